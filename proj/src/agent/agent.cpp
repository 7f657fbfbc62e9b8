#include "agent/agent.hpp"

#include "completer/parser.hpp"
#include "completer/prompt.hpp"
#include "world/subgoal.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <set>

namespace taskgrid::agent {

using namespace world;
using mapper::SemanticMap;

std::string_view error_mode_name(ErrorMode m) {
    switch (m) {
        case ErrorMode::None: return "none";
        case ErrorMode::GoalObjectNotFound: return "goal_object_not_found";
        case ErrorMode::InteractionFailure: return "interaction_failure";
        case ErrorMode::NavigationFailure: return "navigation_failure";
    }
    return "none";
}

std::optional<ErrorMode> parse_error_mode(std::string_view text) {
    for (ErrorMode m : {ErrorMode::None, ErrorMode::GoalObjectNotFound, ErrorMode::InteractionFailure,
                        ErrorMode::NavigationFailure}) {
        if (error_mode_name(m) == text) return m;
    }
    return std::nullopt;
}

nlohmann::json EpisodeResult::to_json() const {
    nlohmann::json log = nlohmann::json::array();
    for (const auto& r : subgoal_log) {
        log.push_back({{"subgoal", r.subgoal},
                       {"source", r.source},
                       {"target", r.target ? nlohmann::json::array({r.target->row, r.target->col}) : nlohmann::json(nullptr)},
                       {"ok", r.ok},
                       {"message", r.message},
                       {"step", r.step}});
    }
    return {{"seed", seed},
            {"room_type", room},
            {"task_type", task_type},
            {"hard", hard},
            {"success", success},
            {"goal_conditions", {satisfied, total}},
            {"steps", steps},
            {"expert_length", expert_length},
            {"errors", errors},
            {"error_mode", error_mode_name(error_mode)},
            {"completer_calls", completer_calls},
            {"recovered_subgoals", recovered_subgoals},
            {"trajectory", trajectory},
            {"subgoals", log}};
}

EpisodeResult EpisodeResult::from_json(const nlohmann::json& j) {
    EpisodeResult r;
    r.seed = j.at("seed").get<std::uint64_t>();
    r.room = j.at("room_type").get<std::string>();
    r.task_type = j.at("task_type").get<std::string>();
    r.hard = j.at("hard").get<bool>();
    r.success = j.at("success").get<bool>();
    r.satisfied = j.at("goal_conditions").at(0).get<int>();
    r.total = j.at("goal_conditions").at(1).get<int>();
    r.steps = j.at("steps").get<int>();
    r.expert_length = j.at("expert_length").get<int>();
    r.errors = j.at("errors").get<int>();
    r.error_mode = parse_error_mode(j.at("error_mode").get<std::string>()).value_or(ErrorMode::None);
    r.completer_calls = j.value("completer_calls", 0);
    r.recovered_subgoals = j.value("recovered_subgoals", 0);
    r.trajectory = j.value("trajectory", std::vector<std::string>{});
    for (const auto& e : j.value("subgoals", nlohmann::json::array())) {
        SubgoalRecord s;
        s.subgoal = e.at("subgoal").get<std::string>();
        s.source = e.at("source").get<std::string>();
        if (!e.at("target").is_null()) s.target = Cell{e.at("target").at(0).get<int>(), e.at("target").at(1).get<int>()};
        s.ok = e.at("ok").get<bool>();
        s.message = e.at("message").get<std::string>();
        s.step = e.at("step").get<int>();
        r.subgoal_log.push_back(s);
    }
    return r;
}

NavGrid known_grid(const SemanticMap& map) {
    NavGrid g{map.width(), map.height(), std::vector<bool>(static_cast<std::size_t>(map.width() * map.height()))};
    for (int r = 0; r < map.height(); ++r)
        for (int c = 0; c < map.width(); ++c)
            g.free[static_cast<std::size_t>(r * map.width() + c)] = map.explored({r, c}) && !map.obstacle({r, c});
    const Cell a = map.agent().cell;
    if (map.in_bounds(a)) g.free[static_cast<std::size_t>(a.row * map.width() + a.col)] = true;
    return g;
}

std::optional<std::vector<ActionKind>> plan_path(const SemanticMap& map, const AgentPose& from, Cell to) {
    return plan_to_face(known_grid(map), from, to);
}

namespace {

bool has_unexplored_neighbour(const SemanticMap& map, Cell c) {
    for (int h = 0; h < 4; ++h) {
        const Cell n = step_toward(c, static_cast<Heading>(h));
        if (map.in_bounds(n) && !map.explored(n)) return true;
    }
    return false;
}

using Hook = std::function<bool(ActionKind)>;

std::optional<Cell> nearest_frontier(const SemanticMap& map, const AgentPose& pose, const std::set<Cell>& skip) {
    const NavGrid g = known_grid(map);
    const auto dist = distance_field(g, pose.cell);
    std::optional<Cell> best;
    int best_d = 0;
    for (int r = 0; r < map.height(); ++r) {
        for (int c = 0; c < map.width(); ++c) {
            const int d = dist[static_cast<std::size_t>(r * map.width() + c)];
            if (d == kUnreachable || skip.count({r, c}) || !has_unexplored_neighbour(map, {r, c})) continue;
            if (!best || d < best_d) {
                best = Cell{r, c};
                best_d = d;
            }
        }
    }
    return best;
}

// Walks to the nearest frontier and turns towards the unexplored side.
// False when no frontier is left or the hook refuses to continue.
bool explore_once(const SemanticMap& map, const AgentPose& pose, std::set<Cell>& visited, const Hook& act) {
    const auto f = nearest_frontier(map, pose, visited);
    if (!f) return false;
    visited.insert(*f);
    const auto path = plan_to_stand(known_grid(map), pose, *f);
    if (!path) return false;
    for (ActionKind k : *path) {
        if (!act(k)) return false;
    }
    for (int turn = 0; turn < 3; ++turn) {
        const AgentPose& p = map.agent();
        const Cell ahead = p.faced();
        if (map.in_bounds(ahead) && !map.explored(ahead)) break;
        const Cell right = step_toward(p.cell, rotate_right(p.heading));
        const bool go_right = map.in_bounds(right) && !map.explored(right);
        if (!act(go_right ? ActionKind::RotateRight : ActionKind::RotateLeft)) return false;
    }
    return true;
}

int survey_impl(const SemanticMap& map, int budget, int start_steps, std::set<Cell>& visited,
                const std::function<int()>& steps, const Hook& act) {
    auto within = [&] { return steps() - start_steps < budget; };
    for (int k = 0; k < 4 && within(); ++k) {
        if (!act(ActionKind::RotateLeft)) break;
    }
    while (within()) {
        const Hook bounded = [&](ActionKind a) { return within() && act(a); };
        if (!explore_once(map, map.agent(), visited, bounded)) break;
    }
    return steps() - start_steps;
}

} // namespace

Cell explore_frontier(const SemanticMap& map, const AgentPose& pose) {
    const auto best = nearest_frontier(map, pose, {});
    if (!best) throw MapFullyExplored();
    return *best;
}

int survey(WorldState& state, SemanticMap& map, int budget) {
    std::set<Cell> visited;
    return survey_impl(map, budget, state.steps, visited, [&] { return state.steps; }, [&](ActionKind k) {
        if (state.terminated) return false;
        step(state, PrimitiveAction::make(k));
        mapper::update(map, observe(state));
        return true;
    });
}

namespace {

enum class FailureKind { None, NotFound, Interaction, Navigation };

struct Outcome {
    bool ok = false;
    FailureKind kind = FailureKind::None;
    std::string message;
    std::optional<Cell> target;
};

struct Placement {
    Cell cell;
    Category category;
    int instruction;
};

class Episode {
public:
    Episode(const GridScene& scene, const TaskSpec& task, const AgentConfig& config, completer::Backend* backend)
        : task_(task), config_(config), backend_(backend), state_(WorldState::start(scene)),
          map_(scene.height, scene.width) {
        for (Category c : possible_landmarks(scene.room_type)) possible_.emplace_back(name(c));
    }

    EpisodeResult run() {
        refresh();
        if (config_.survey_budget > 0) {
            survey_impl(map_, config_.survey_budget, state_.steps, visited_, [&] { return state_.steps; },
                        [&](ActionKind k) { return act(k).ok; });
        }
        const auto sparse = parse_instructions(task_.step_instructions);
        for (const Subgoal& original : sparse) {
            if (state_.terminated) break;
            run_original(original);
        }
        if (!state_.terminated) act(ActionKind::Stop);
        return finish();
    }

private:
    Event act(ActionKind k, std::optional<Category> target = std::nullopt) {
        if (state_.terminated) return {false, "episode terminated"};
        const auto a = PrimitiveAction::make(k, target);
        result_.trajectory.push_back(to_string(a));
        Event e = step(state_, a);
        refresh();
        return e;
    }

    void refresh() {
        mapper::update(map_, observe(state_));
        if (!goal_seen_) {
            goal_seen_ = !map_.cells_of(task_.goal_object).empty() ||
                         (state_.held && state_.scene.object(*state_.held).category == task_.goal_object);
        }
    }

    // Steps for one sparse subgoal, including completer recovery.
    void run_original(const Subgoal& original) {
        int calls = 0;
        std::deque<std::pair<Subgoal, bool>> pending{{original, false}};
        if (config_.use_completer && backend_) consult(original, calls, pending);
        while (!pending.empty() && !state_.terminated) {
            auto [sg, recovered] = pending.front();
            if (sg.action == SubgoalAction::GotoLocation && pending.size() > 1 &&
                pending[1].first.object == sg.object) {
                pending.pop_front();
                continue;
            }
            const Outcome out = execute(sg);
            log(sg, recovered, out);
            if (out.ok) {
                pending.pop_front();
                completed_.push_back(sg);
                last_message_.clear();
                continue;
            }
            last_failure_ = out.kind;
            last_message_ = out.message;
            if (config_.use_completer && backend_ && calls < config_.max_completer_calls) {
                consult(original, calls, pending);
            } else {
                break;
            }
        }
    }

    void consult(const Subgoal& original, int& calls, std::deque<std::pair<Subgoal, bool>>& pending) {
        ++calls;
        ++result_.completer_calls;
        completer::TaskProgress progress;
        progress.completed = completed_;
        progress.current = original;
        progress.all = completed_;
        for (const auto& [s, r] : pending) progress.all.push_back(s);
        const auto observed = mapper::landmark_names(mapper::observed_landmarks(map_));
        completer::CompletionRequest req;
        req.bundle = completer::build_prompt(completer::Templates::defaults(), task_, progress, observed, possible_,
                                             last_message_);
        req.current = original;
        req.exclude = pickup_exclusions(original);
        req.truth = &state_;
        std::vector<Subgoal> plan;
        try {
            plan = completer::parse_response(backend_->complete(req), possible_, original).subgoals;
        } catch (const std::exception&) {
            return;   // keep following the sparse instruction
        }
        std::vector<Subgoal> hints;
        if (config_.ground_truth_positions) {
            try {
                hints = completer::oracle_complete(state_, original, req.exclude).subgoals;
            } catch (const std::exception&) {
            }
        }
        std::vector<bool> used(hints.size(), false);
        pending.clear();
        for (std::size_t i = 0; i < plan.size(); ++i) {
            Subgoal s = plan[i];
            s.instruction = original.instruction;
            s.position.reset();
            for (std::size_t h = 0; h < hints.size(); ++h) {
                if (!used[h] && hints[h].same_step(s)) {
                    used[h] = true;
                    s.position = hints[h].position;
                    break;
                }
            }
            pending.emplace_back(s, i + 1 < plan.size());
        }
        result_.recovered_subgoals += static_cast<int>(plan.size()) - 1;
    }

    std::vector<Cell> pickup_exclusions(const Subgoal& sg) const {
        std::vector<Cell> out;
        if (sg.action != SubgoalAction::PickupObject) return out;
        for (const auto& p : placements_) {
            if (p.category == sg.object && p.instruction != sg.instruction) out.push_back(p.cell);
        }
        return out;
    }

    std::set<Cell> exclusions(const Subgoal& sg) const {
        std::set<Cell> out;
        for (Cell c : pickup_exclusions(sg)) out.insert(c);
        if (sg.action == SubgoalAction::OpenObject) out.insert(opened_.begin(), opened_.end());
        return out;
    }

    std::optional<Cell> nearest_mapped(Category c, const std::set<Cell>& exclude) const {
        const Cell a = map_.agent().cell;
        std::optional<Cell> best;
        int best_d = 0;
        for (Cell x : map_.cells_of(c)) {
            if (exclude.count(x)) continue;
            const int d = std::abs(x.row - a.row) + std::abs(x.col - a.col);
            if (!best || d < best_d) {
                best = x;
                best_d = d;
            }
        }
        return best;
    }

    // Target cell for a subgoal; nullopt means "explore first". With
    // `final` set the confidence threshold is dropped.
    std::optional<Cell> locate(const Subgoal& sg, const std::set<Cell>& exclude, bool final) const {
        if (sg.position && !exclude.count(*sg.position)) return sg.position;
        if (config_.ground_truth_positions) {
            try {
                const auto hint = completer::oracle_complete(state_, sg, pickup_exclusions(sg)).subgoals.back().position;
                if (hint && !exclude.count(*hint)) return hint;
            } catch (const std::exception&) {
            }
        }
        if (config_.use_localizer && config_.localizer) {
            const auto heat = config_.localizer->predict(map_, localizer::localizer_text(sg, localizer::subgoal_sentence(task_, sg)));
            std::optional<Cell> best;
            double best_p = -1.0;
            for (Cell x : map_.cells_of(sg.object)) {
                if (exclude.count(x)) continue;
                if (heat.at(x) > best_p) {
                    best_p = heat.at(x);
                    best = x;
                }
            }
            if (best && (final || best_p >= config_.tau)) return best;
            return std::nullopt;
        }
        return nearest_mapped(sg.object, exclude);
    }

    Outcome execute(const Subgoal& sg) {
        if (sg.action == SubgoalAction::PutObject && !state_.held) {
            return {false, FailureKind::Interaction, "nothing in hand to put", std::nullopt};
        }
        if (sg.action == SubgoalAction::PickupObject && state_.held) {
            return {false, FailureKind::Interaction, "hand is full", std::nullopt};
        }
        std::set<Cell> exclude = exclusions(sg);
        int interaction_attempts = 0;
        Outcome last{false, FailureKind::NotFound, std::string(name(sg.object)) + " not found", std::nullopt};
        Subgoal current = sg;
        while (!state_.terminated) {
            std::optional<Cell> target = locate(current, exclude, false);
            while (!target && !state_.terminated) {
                if (!explore_once(map_, map_.agent(), visited_, [&](ActionKind k) { return act(k).ok; })) break;
                target = locate(current, exclude, false);
            }
            if (!target) target = locate(current, exclude, true);
            if (!target) return last;
            const auto path = plan_path(map_, state_.agent, *target);
            if (!path) {
                exclude.insert(*target);
                current.position.reset();
                last = {false, FailureKind::Navigation, "cannot reach " + std::string(name(sg.object)), target};
                continue;
            }
            for (ActionKind k : *path) act(k);
            if (state_.terminated) break;
            if (sg.action == SubgoalAction::GotoLocation) return {true, FailureKind::None, "arrived", target};
            const Category held_before = state_.held ? state_.scene.object(*state_.held).category : sg.object;
            const Event e = act(*to_action_kind(sg.action), sg.object);
            if (e.ok) {
                if (sg.action == SubgoalAction::OpenObject) opened_.push_back(*target);
                if (sg.action == SubgoalAction::PutObject) placements_.push_back({*target, held_before, sg.instruction});
                return {true, FailureKind::None, e.message, target};
            }
            last = {false, FailureKind::Interaction, e.message, target};
            exclude.insert(*target);
            current.position.reset();
            // Re-localize once before handing the failure back.
            if (++interaction_attempts >= 2) return last;
        }
        return last;
    }

    void log(const Subgoal& sg, bool recovered, const Outcome& out) {
        result_.subgoal_log.push_back({world::to_string(sg), recovered ? "completer" : "instruction", out.target, out.ok,
                                       out.message, state_.steps});
    }

    EpisodeResult finish() {
        const auto report = check_goal(state_, task_);
        result_.seed = state_.scene.seed;
        result_.room = std::string(room_name(state_.scene.room_type));
        result_.task_type = std::string(task_type_name(task_.type));
        result_.hard = task_.hard;
        result_.success = report.success;
        result_.satisfied = report.satisfied_count;
        result_.total = report.total;
        result_.steps = state_.steps;
        result_.errors = state_.errors;
        if (report.success) {
            result_.error_mode = ErrorMode::None;
        } else if (!goal_seen_) {
            result_.error_mode = ErrorMode::GoalObjectNotFound;
        } else if (state_.errors > kMaxErrors || last_failure_ == FailureKind::Interaction) {
            result_.error_mode = ErrorMode::InteractionFailure;
        } else {
            result_.error_mode = ErrorMode::NavigationFailure;
        }
        return result_;
    }

    const TaskSpec& task_;
    const AgentConfig& config_;
    completer::Backend* backend_;
    WorldState state_;
    SemanticMap map_;
    std::vector<std::string> possible_;
    std::vector<Subgoal> completed_;
    std::vector<Cell> opened_;
    std::vector<Placement> placements_;
    std::string last_message_;
    FailureKind last_failure_ = FailureKind::None;
    bool goal_seen_ = false;
    std::set<Cell> visited_;
    EpisodeResult result_;
};

} // namespace

EpisodeResult run_episode(const GridScene& scene, const TaskSpec& task, const AgentConfig& config,
                          completer::Backend* backend) {
    return Episode(scene, task, config, backend).run();
}

} // namespace taskgrid::agent
