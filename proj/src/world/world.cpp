#include "world/world.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>

namespace taskgrid::world {

namespace {

constexpr std::array<std::string_view, kActionCount> kActionNames{
    "MoveAhead", "RotateLeft", "RotateRight", "LookUp", "LookDown",
    "PickupObject", "PutObject", "OpenObject", "CloseObject",
    "ToggleObjectOn", "ToggleObjectOff", "SliceObject", "Stop"};

Event fail(WorldState& s, std::string message) {
    ++s.errors;
    return {false, std::move(message)};
}

std::string cat(Category c) { return std::string(name(c)); }

// Lowest-id visible instance of `c` in the faced cell.
std::optional<ObjectId> resolve(const WorldState& s, Category c) {
    const Cell f = s.agent.faced();
    for (const auto& o : s.scene.objects) {
        if (o.category == c && o.cell == f && !s.scene.sealed(o.id)) return o.id;
    }
    return std::nullopt;
}

void for_each_content(GridScene& scene, ObjectId root, const auto& fn) {
    std::vector<ObjectId> frontier{root};
    while (!frontier.empty()) {
        const ObjectId cur = frontier.back();
        frontier.pop_back();
        for (auto& o : scene.objects) {
            if (o.contained_in == cur) {
                fn(o);
                frontier.push_back(o.id);
            }
        }
    }
}

bool contains_category(const GridScene& scene, ObjectId holder, Category c) {
    return std::any_of(scene.objects.begin(), scene.objects.end(), [&](const ObjectInstance& o) {
        return o.contained_in == holder && o.category == c;
    });
}

Event interact(WorldState& s, const PrimitiveAction& a) {
    const Category target = *a.target;
    const std::string tname = cat(target);

    if (a.kind == ActionKind::PutObject) {
        if (!s.held) return fail(s, "nothing in hand to put");
        const auto rid = resolve(s, target);
        if (!rid) return fail(s, tname + " not visible");
        auto& r = s.scene.object(*rid);
        if (!info(target).receptacle) return fail(s, tname + " is not a receptacle");
        if (info(target).openable && !r.open) return fail(s, tname + " is closed");
        auto& obj = s.scene.object(*s.held);
        if (info(r.category).pickupable && info(obj.category).receptacle) {
            return fail(s, cat(obj.category) + " does not fit in the " + tname);
        }
        obj.held = false;
        obj.contained_in = r.id;
        obj.cell = r.cell;
        for_each_content(s.scene, obj.id, [&](ObjectInstance& o) { o.cell = r.cell; });
        s.held.reset();
        return {true, "put " + cat(obj.category) + " in " + tname};
    }

    const auto id = resolve(s, target);
    if (!id) return fail(s, tname + " not visible");
    auto& o = s.scene.object(*id);
    const auto& ci = info(target);

    switch (a.kind) {
        case ActionKind::PickupObject: {
            if (!ci.pickupable) return fail(s, tname + " cannot be picked up");
            if (s.held) return fail(s, "hand is full");
            o.held = true;
            o.cell.reset();
            o.contained_in.reset();
            for_each_content(s.scene, o.id, [](ObjectInstance& c) { c.cell.reset(); });
            s.held = o.id;
            return {true, "picked up " + tname};
        }
        case ActionKind::OpenObject:
            if (!ci.openable) return fail(s, tname + " cannot be opened");
            if (o.open) return fail(s, tname + " is already open");
            o.open = true;
            return {true, "opened " + tname};
        case ActionKind::CloseObject:
            if (!ci.openable) return fail(s, tname + " cannot be closed");
            if (!o.open) return fail(s, tname + " is already closed");
            o.open = false;
            return {true, "closed " + tname};
        case ActionKind::ToggleObjectOn: {
            if (!ci.toggleable) return fail(s, tname + " cannot be toggled");
            if (o.on) return fail(s, tname + " is already on");
            o.on = true;
            const Category device = o.category;
            for_each_content(s.scene, o.id, [device](ObjectInstance& c) {
                if (device == Category::SinkBasin) c.clean = true;
                if (device == Category::Microwave || device == Category::StoveBurner) c.hot = true;
                if (device == Category::Fridge) c.cold = true;
            });
            return {true, "turned on " + tname};
        }
        case ActionKind::ToggleObjectOff:
            if (!ci.toggleable) return fail(s, tname + " cannot be toggled");
            if (!o.on) return fail(s, tname + " is already off");
            o.on = false;
            return {true, "turned off " + tname};
        case ActionKind::SliceObject:
            if (!ci.sliceable) return fail(s, tname + " cannot be sliced");
            if (o.sliced) return fail(s, tname + " is already sliced");
            if (!s.held || s.scene.object(*s.held).category != Category::Knife) {
                return fail(s, "a knife is needed to slice " + tname);
            }
            o.sliced = true;
            return {true, "sliced " + tname};
        default:
            break;
    }
    return fail(s, "unsupported interaction");
}

// Supercover-free integer line walk; true when no intermediate cell is a wall.
bool line_of_sight(const GridScene& scene, Cell from, Cell to) {
    int r0 = from.row, c0 = from.col;
    const int dr = std::abs(to.row - r0), dc = std::abs(to.col - c0);
    const int sr = to.row > r0 ? 1 : -1, sc = to.col > c0 ? 1 : -1;
    int err = dc - dr;
    while (r0 != to.row || c0 != to.col) {
        const int e2 = 2 * err;
        if (e2 > -dr) { err -= dr; c0 += sc; }
        if (e2 < dc) { err += dc; r0 += sr; }
        if ((r0 != to.row || c0 != to.col) && scene.is_wall({r0, c0})) return false;
    }
    return true;
}

} // namespace

bool is_interaction(ActionKind k) {
    return k >= ActionKind::PickupObject && k <= ActionKind::SliceObject;
}

std::string_view action_name(ActionKind k) { return kActionNames[static_cast<std::size_t>(k)]; }

std::optional<ActionKind> parse_action(std::string_view text) {
    for (std::size_t i = 0; i < kActionCount; ++i) {
        if (kActionNames[i] == text) return static_cast<ActionKind>(i);
    }
    return std::nullopt;
}

PrimitiveAction PrimitiveAction::make(ActionKind kind, std::optional<Category> target) {
    if (is_interaction(kind) != target.has_value()) {
        throw ActionError(std::string(action_name(kind)) +
                          (target ? " takes no target" : " requires a target category"));
    }
    return {kind, target};
}

std::string to_string(const PrimitiveAction& a) {
    std::string out(action_name(a.kind));
    if (a.target) out += " " + std::string(name(*a.target));
    return out;
}

WorldState WorldState::start(GridScene scene) {
    WorldState s;
    s.agent = scene.spawn;
    s.scene = std::move(scene);
    return s;
}

Event step(WorldState& s, const PrimitiveAction& a) {
    if (s.terminated) return {false, "episode terminated"};
    if (is_interaction(a.kind) != a.target.has_value()) {
        ++s.steps;
        Event e = fail(s, "malformed action");
        s.last_event = e.message;
        if (s.steps >= kMaxSteps || s.errors > kMaxErrors) s.terminated = true;
        return e;
    }
    ++s.steps;
    Event e;
    switch (a.kind) {
        case ActionKind::MoveAhead: {
            const Cell next = s.agent.faced();
            if (s.scene.walkable(next)) {
                s.agent.cell = next;
                e = {true, "moved"};
            } else {
                e = fail(s, "blocked");
            }
            break;
        }
        case ActionKind::RotateLeft:
            s.agent.heading = rotate_left(s.agent.heading);
            e = {true, "rotated left"};
            break;
        case ActionKind::RotateRight:
            s.agent.heading = rotate_right(s.agent.heading);
            e = {true, "rotated right"};
            break;
        case ActionKind::LookUp:
            s.agent.look = s.agent.look == Look::Down ? Look::Level : Look::Up;
            e = {true, "looked up"};
            break;
        case ActionKind::LookDown:
            s.agent.look = s.agent.look == Look::Up ? Look::Level : Look::Down;
            e = {true, "looked down"};
            break;
        case ActionKind::Stop:
            s.stopped = true;
            s.terminated = true;
            e = {true, "stopped"};
            break;
        default:
            e = interact(s, a);
            break;
    }
    s.last_event = e.message;
    if (s.steps >= kMaxSteps || s.errors > kMaxErrors) s.terminated = true;
    return e;
}

std::vector<Cell> visible_cells(const GridScene& scene, const AgentPose& pose) {
    const Cell fwd = step_toward({0, 0}, pose.heading);
    const Cell right = step_toward({0, 0}, rotate_right(pose.heading));
    std::vector<Cell> out;
    for (int f = 0; f <= kViewRange; ++f) {
        for (int l = -f; l <= f; ++l) {
            const Cell c{pose.cell.row + f * fwd.row + l * right.row,
                         pose.cell.col + f * fwd.col + l * right.col};
            if (!scene.in_bounds(c)) continue;
            if (!line_of_sight(scene, pose.cell, c)) continue;
            out.push_back(c);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

EgocentricObservation observe(const WorldState& s) {
    EgocentricObservation obs;
    obs.pose = s.agent;
    const auto cells = visible_cells(s.scene, s.agent);
    for (const Cell& c : cells) obs.cells.push_back({c, !s.scene.walkable(c)});
    for (const auto& o : s.scene.objects) {
        if (!o.cell || s.scene.sealed(o.id)) continue;
        if (std::binary_search(cells.begin(), cells.end(), *o.cell)) {
            obs.instances.push_back({*o.cell, o.category, o.open, o.on, o.sliced});
        }
    }
    return obs;
}

bool condition_holds(const WorldState& s, const GoalCondition& c) {
    const auto& scene = s.scene;
    auto flags_ok = [&](const ObjectInstance& o) {
        return (!c.need_clean || o.clean) && (!c.need_hot || o.hot) && (!c.need_cold || o.cold);
    };
    switch (c.kind) {
        case ConditionKind::Placed: {
            int n = 0;
            for (const auto& o : scene.objects) {
                if (o.category != c.object || o.held || !o.contained_in || !flags_ok(o)) continue;
                if (scene.object(*o.contained_in).category != *c.receptacle) continue;
                if (c.containing && !contains_category(scene, o.id, *c.containing)) continue;
                ++n;
            }
            return n >= c.count;
        }
        case ConditionKind::Held:
            return s.held && scene.object(*s.held).category == c.object && flags_ok(scene.object(*s.held));
        case ConditionKind::ToggledOn:
            return std::any_of(scene.objects.begin(), scene.objects.end(), [&](const ObjectInstance& o) {
                return o.category == c.object && o.on;
            });
        case ConditionKind::Cleaned:
        case ConditionKind::Heated:
        case ConditionKind::Cooled:
        case ConditionKind::Sliced:
            return std::any_of(scene.objects.begin(), scene.objects.end(), [&](const ObjectInstance& o) {
                if (o.category != c.object) return false;
                switch (c.kind) {
                    case ConditionKind::Cleaned: return o.clean;
                    case ConditionKind::Heated: return o.hot;
                    case ConditionKind::Cooled: return o.cold;
                    default: return o.sliced;
                }
            });
    }
    return false;
}

GoalReport check_goal(const WorldState& s, const TaskSpec& task) {
    GoalReport r;
    r.total = static_cast<int>(task.goal_conditions.size());
    for (const auto& c : task.goal_conditions) {
        const bool ok = condition_holds(s, c);
        r.satisfied.push_back(ok);
        r.satisfied_count += ok ? 1 : 0;
    }
    r.success = r.total > 0 && r.satisfied_count == r.total;
    return r;
}

} // namespace taskgrid::world
