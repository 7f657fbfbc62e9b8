// Acceptance run: prints one PASS/FAIL line per check and exits non-zero if
// any check fails.

#include "agent/agent.hpp"
#include "completer/parser.hpp"
#include "completer/prompt.hpp"
#include "harness/collect.hpp"
#include "harness/eval.hpp"
#include "harness/metrics.hpp"
#include "harness/training.hpp"
#include "localizer/model.hpp"
#include "localizer/train.hpp"
#include "world/expert.hpp"
#include "world/generator.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

using namespace taskgrid;
using Clock = std::chrono::steady_clock;

namespace {

const std::string kData = TASKGRID_TEST_DATA;
int failures = 0;

void report(int id, const char* name, bool ok, const std::string& detail) {
    std::printf("%s [%d] %s: %s\n", ok ? "PASS" : "FAIL", id, name, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<double> values(const tensor::Tensor& t) { return {t.values().begin(), t.values().end()}; }

// Each check returns nothing and reports itself; exceptions count as FAIL.
template <class F>
void guarded(int id, const char* name, F&& f) {
    try {
        f();
    } catch (const std::exception& e) {
        report(id, name, false, std::string("exception: ") + e.what());
    }
}

void gradient_check() {
    const auto t0 = Clock::now();
    double worst = 0.0;
    std::size_t checked = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        localizer::LocalizerConfig cfg;
        cfg.height = 6;
        cfg.width = 6;
        cfg.d = 8;
        cfg.conv_channels = 4;
        cfg.seed = seed;
        cfg.roles = seed % 2 ? localizer::AttentionRoles::Eq2 : localizer::AttentionRoles::Prose;
        localizer::LocalizerModel model(cfg);
        std::mt19937_64 rng(seed + 100);
        std::uniform_real_distribution<double> u(-0.3, 0.3);
        for (auto& [n, t] : model.params())
            for (double& v : t.mutable_values()) v += u(rng);

        world::EgocentricObservation obs;
        obs.pose.cell = {static_cast<int>(rng() % 6), static_cast<int>(rng() % 6)};
        for (int r = 0; r < 6; ++r)
            for (int c = 0; c < 6; ++c) {
                if (rng() % 4 == 0) continue;
                obs.cells.push_back({{r, c}, rng() % 7 == 0});
                if (rng() % 3 == 0) obs.instances.push_back({{r, c}, world::category_at(rng() % world::kCategoryCount)});
            }
        localizer::TrainSample s;
        s.map = mapper::SemanticMap(6, 6);
        mapper::update(s.map, obs);
        s.text = "open cabinet put the mug in the cabinet";
        s.gt_cells = {{static_cast<int>(rng() % 6), static_cast<int>(rng() % 6)}};

        for (auto& [n, t] : model.params()) t.zero_grad();
        localizer::sample_loss(model, s).backward();
        for (auto& [name, t] : model.params()) {
            auto v = t.mutable_values();
            std::vector<double> analytic(t.grad().begin(), t.grad().end());
            analytic.resize(v.size(), 0.0);
            for (std::size_t i = 0; i < v.size(); ++i) {
                const double old = v[i];
                double hi, lo;
                {
                    tensor::NoGradGuard g;
                    v[i] = old + 1e-4;
                    hi = localizer::sample_loss(model, s).item();
                    v[i] = old - 1e-4;
                    lo = localizer::sample_loss(model, s).item();
                }
                v[i] = old;
                const double fd = (hi - lo) / 2e-4;
                worst = std::max(worst, std::abs(fd - analytic[i]) / std::max(1e-6, std::abs(fd) + std::abs(analytic[i])));
                ++checked;
            }
        }
    }
    const double secs = seconds_since(t0);
    report(1, "gradient check", worst < 1e-3 && secs < 60.0,
           fmt("%.0f entries over 20 seeds, worst rel err %.2e, %.1f s", static_cast<double>(checked), worst, secs));
}

void graph_and_attention() {
    localizer::LocalizerModel model;
    const auto [scene, task] = world::generate_scene(11, world::RoomType::Kitchen, false);
    auto state = world::WorldState::start(scene);
    mapper::SemanticMap map(scene.height, scene.width);
    mapper::update(map, world::observe(state));
    agent::survey(state, map, 60);
    for (double& v : model.param("graph.W_a").mutable_values()) v = 0.0;
    const auto enc = model.encode_map(map);
    const bool identity = values(model.graph_enhance(enc.x_prime, model.correlation_graph(enc.x_prime))) == values(enc.x_prime);

    std::mt19937_64 rng(2);
    std::normal_distribution<double> n(0.0, 3.0);
    auto rnd = [&](std::size_t r, std::size_t c) {
        std::vector<double> v(r * c);
        for (double& x : v) x = n(rng);
        return tensor::Tensor::from({r, c}, v);
    };
    double worst_row = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const auto res = localizer::attention(rnd(20, 8), rnd(13, 8), rnd(13, 5));
        for (std::size_t i = 0; i < 20; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < 13; ++j) s += res.weights.at(i, j);
            worst_row = std::max(worst_row, std::abs(s - 1.0));
        }
    }
    const auto v = rnd(1, 5);
    const auto single = localizer::attention(rnd(7, 8), rnd(1, 8), v);
    bool exact = true;
    for (std::size_t i = 0; i < 7; ++i)
        for (std::size_t c = 0; c < 5; ++c) exact = exact && single.output.at(i, c) == v.at(0, c);
    report(2, "graph identity and attention", identity && worst_row < 1e-6 && exact,
           std::string("zero W_a identity ") + (identity ? "bit-exact" : "differs") + fmt(", worst row-sum error %.1e", worst_row) +
               ", single key " + (exact ? "exact" : "inexact"));
}

void bce_values() {
    const auto target = tensor::Tensor::from({6, 1}, {1, 0, 0, 1, 0, 0});
    const double half = tensor::bce_loss(tensor::Tensor::filled({6, 1}, 0.5), target).item();
    const double perfect = tensor::bce_loss(target, target).item();
    const double err = std::abs(half - std::log(2.0));
    report(3, "bce values", err < 1e-12 && perfect < 2e-6, fmt("|uniform - ln 2| = %.1e, perfect = %.2e", err, perfect));
}

struct Trained {
    std::string graph_path;
    std::string no_graph_path;
};

Trained train_models(const std::filesystem::path& dir) {
    harness::EvalConfig gen;
    gen.split = "train";
    gen.episodes = 400;
    gen.hard_fraction = 0.5;
    auto t0 = Clock::now();
    const auto data = harness::collect_dataset(harness::generate_scenes(gen), gen.survey_budget);
    const double collect_secs = seconds_since(t0);

    t0 = Clock::now();
    localizer::LocalizerModel model;
    const auto rep = harness::train_localizer(model, data, harness::TrainingRun{});
    const double train_secs = seconds_since(t0);
    Trained out{(dir / "graph.json").string(), (dir / "no_graph.json").string()};
    model.save(out.graph_path);
    const double hit = rep.heldout.hit_rate();
    report(4, "localizer training", data.size() >= 500 && hit >= 0.8 && train_secs < 600.0,
           fmt("%.0f samples, held-out within-1 hit rate %.3f (nearest instance %.3f), train %.0f s", static_cast<double>(data.size()),
               hit, rep.baseline.hit_rate(), train_secs) +
               fmt(", collect %.0f s", collect_secs));

    localizer::LocalizerConfig ng;
    ng.use_graph = false;
    localizer::LocalizerModel plain(ng);
    const auto rep_ng = harness::train_localizer(plain, data, harness::TrainingRun{});
    plain.save(out.no_graph_path);
    std::printf("     no-graph localizer held-out hit rate %.3f\n", rep_ng.heldout.hit_rate());
    return out;
}

harness::EvalConfig hard_config() {
    harness::EvalConfig c;
    c.split = "valid_unseen";
    c.episodes = 50;
    c.hard_fraction = 1.0;
    return c;
}

void ablation(const Trained& models) {
    const auto t0 = Clock::now();
    auto run = [](harness::EvalConfig c) { return harness::run_eval(c).metrics.overall; };

    auto no_comp = hard_config();
    no_comp.use_completer = false;
    no_comp.use_localizer = false;
    auto full = hard_config();
    full.checkpoint = models.graph_path;
    auto no_graph = hard_config();
    no_graph.use_graph = false;
    no_graph.checkpoint = models.no_graph_path;
    auto no_loc = hard_config();
    no_loc.use_localizer = false;

    const auto s_nc = run(no_comp), s_full = run(full), s_ng = run(no_graph), s_nl = run(no_loc);
    const double secs = seconds_since(t0);
    const bool ok = s_nc.sr == 0.0 && s_full.sr >= 0.9 && s_full.sr >= s_ng.sr && s_ng.sr >= s_nl.sr &&
                    s_full.plwsr > s_nl.plwsr && secs < 300.0;
    report(5, "hard ablation", ok,
           fmt("SR w/o completer %.2f, full %.2f, w/o graph %.2f, w/o localizer %.2f", s_nc.sr, s_full.sr, s_ng.sr, s_nl.sr) +
               fmt("; PLWSR full %.4f vs w/o localizer %.4f; %.1f s", s_full.plwsr, s_nl.plwsr, secs));
}

void expert_soundness() {
    int solved = 0, total = 0;
    std::set<world::TaskType> types;
    for (std::uint64_t seed = 1000; total < 100; ++seed) {
        for (world::RoomType room : world::kRoomTypes) {
            const bool hard = seed % 2 == 0;
            for (world::TaskType t : world::task_types_for(room, hard)) {
                if (total == 100) break;
                world::GeneratorOptions opt;
                opt.task_type = t;
                const auto [scene, task] = world::generate_scene(seed, room, hard, opt);
                ++total;
                try {
                    const auto plan = world::expert_plan(scene, task);
                    auto s = world::WorldState::start(scene);
                    for (const auto& a : plan.trajectory) world::step(s, a);
                    if (s.errors == 0 && world::check_goal(s, task).success) ++solved;
                } catch (const world::PlannerError&) {
                }
                types.insert(t);
            }
        }
    }
    report(6, "expert soundness", solved == 100 && types.size() == world::kTaskTypeCount,
           fmt("%.0f/%.0f solved with zero errors, %.0f task types", solved, total, static_cast<double>(types.size())));
}

void metric_identities() {
    auto ep = [](bool success, int sat, int total, int steps, int expert) {
        agent::EpisodeResult r;
        r.task_type = "t";
        r.success = success;
        r.satisfied = sat;
        r.total = total;
        r.steps = steps;
        r.expert_length = expert;
        return r;
    };
    const double same = harness::score({ep(true, 1, 1, 37, 37)}).plwsr;
    const double twice = harness::score({ep(true, 1, 1, 74, 37)}).plwsr;
    const auto m = harness::score({ep(true, 3, 3, 10, 10), ep(false, 1, 3, 10, 10), ep(false, 0, 2, 5, 5)});
    const bool ok = same == 1.0 && twice == 0.5 && m.gc == 0.5 && m.sr == 1.0 / 3.0 && m.plwgc == (1.0 + 1.0 / 3.0) / 3.0;
    report(7, "metric identities", ok, fmt("L=L* gives %.3f, L=2L* gives %.3f, GC %.4f", same, twice, m.gc));
}

void termination() {
    std::mt19937_64 rng(99);
    int max_steps = 0, max_errors = 0, unterminated = 0, by_steps = 0, by_errors = 0;
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        const auto [scene, task] = world::generate_scene(seed, world::kRoomTypes[seed % 4], seed % 2 == 0);
        auto s = world::WorldState::start(scene);
        // odd seeds: mostly rotations and looks, so the step cap is what ends it
        const bool careful = seed % 2 == 1;
        for (int i = 0; i < 5000 && !s.terminated; ++i) {
            auto kind = static_cast<world::ActionKind>(rng() % (world::kActionCount - 1));
            const bool safe = careful && rng() % 200 != 0;
            if (safe) kind = static_cast<world::ActionKind>(1 + rng() % 4);
            std::optional<world::Category> target;
            if (world::is_interaction(kind) || (!safe && rng() % 8 == 0)) target = world::category_at(rng() % world::kCategoryCount);
            world::step(s, world::PrimitiveAction{kind, target});
            max_steps = std::max(max_steps, s.steps);
            max_errors = std::max(max_errors, s.errors);
        }
        unterminated += !s.terminated;
        by_steps += s.steps == world::kMaxSteps;
        by_errors += s.errors > world::kMaxErrors;
    }
    report(8, "termination",
           max_steps <= world::kMaxSteps && max_errors <= world::kMaxErrors + 1 && unterminated == 0 && by_steps > 0 && by_errors > 0,
           fmt("60 random episodes, max steps %.0f, max errors %.0f, unterminated %.0f", max_steps, max_errors, unterminated) +
               fmt(", %.0f hit the step cap, %.0f the error cap", by_steps, by_errors));
}

void prompt_protocol() {
    const auto [scene, task] = world::generate_scene(3, world::RoomType::Kitchen, true);
    completer::TaskProgress p;
    p.all = world::parse_instructions(task.step_instructions);
    p.current = p.all.front();
    std::vector<std::string> possible;
    for (auto c : world::possible_landmarks(world::RoomType::Kitchen)) possible.emplace_back(world::name(c));
    const auto b = completer::build_prompt(completer::Templates::defaults(), task, p, {"CounterTop", "StoveBurner"}, possible, "");
    const bool golden = b.system_message == slurp(kData + "/golden/kitchen_system.txt") &&
                        b.agent_message == slurp(kData + "/golden/kitchen_agent.txt");

    const world::Subgoal mug{world::SubgoalAction::PickupObject, world::Category::Mug, std::nullopt, -1};
    bool accepted = false;
    try {
        accepted = completer::parse_response(slurp(kData + "/fixtures/recovery_fridge.txt"), possible, mug).subgoals.size() == 3;
    } catch (const completer::ParseError&) {
    }
    int rejected = 0, negatives = 0;
    for (const auto& entry : std::filesystem::directory_iterator(kData + "/fixtures")) {
        if (entry.path().filename().string().rfind("bad_", 0) != 0) continue;
        ++negatives;
        try {
            completer::parse_response(slurp(entry.path().string()), possible, mug);
        } catch (const completer::ParseError&) {
            ++rejected;
        }
    }
    report(9, "prompt protocol", golden && accepted && negatives >= 3 && rejected == negatives,
           std::string("golden ") + (golden ? "equal" : "differs") + ", recovery fixture " + (accepted ? "accepted" : "rejected") +
               fmt(", %.0f/%.0f negative fixtures rejected", rejected, negatives));
}

void determinism(const Trained& models) {
    auto c = hard_config();
    c.hard_fraction = 0.5;
    c.checkpoint = models.graph_path;
    const std::string a = harness::run_eval(c).document.dump();
    const std::string b = harness::run_eval(c).document.dump();
    c.workers = 4;
    const std::string p = harness::run_eval(c).document.dump();
    report(10, "determinism", a == b && a == p,
           std::string("repeat ") + (a == b ? "identical" : "differs") + ", 4 workers " + (a == p ? "identical" : "differs") +
               fmt(" (%.0f bytes)", static_cast<double>(a.size())));
}

} // namespace

int main() {
    const auto dir = std::filesystem::temp_directory_path() / "taskgrid_acceptance";
    std::filesystem::create_directories(dir);

    guarded(1, "gradient check", gradient_check);
    guarded(2, "graph identity and attention", graph_and_attention);
    guarded(3, "bce values", bce_values);
    Trained models;
    guarded(4, "localizer training", [&] { models = train_models(dir); });
    guarded(5, "hard ablation", [&] { ablation(models); });
    guarded(6, "expert soundness", expert_soundness);
    guarded(7, "metric identities", metric_identities);
    guarded(8, "termination", termination);
    guarded(9, "prompt protocol", prompt_protocol);
    guarded(10, "determinism", [&] { determinism(models); });

    std::printf("%d check(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
