#include "world/expert.hpp"

#include "world/navigation.hpp"

#include <limits>
#include <set>

namespace taskgrid::world {

namespace {

class Expert {
public:
    Expert(const GridScene& scene, const TaskSpec& task)
        : task_(task), state_(WorldState::start(scene)), grid_(nav_grid(scene)) {}

    ExpertPlan run() {
        const auto sparse = parse_instructions(task_.step_instructions);
        if (sparse.empty()) throw PlannerError("no subgoals in the step instructions");
        int last_put_instruction = -2;
        for (const Subgoal& sg : sparse) {
            switch (sg.action) {
                case SubgoalAction::PickupObject: {
                    const bool again = sg.instruction == last_put_instruction && carried_ &&
                                       state_.scene.object(*carried_).category == sg.object;
                    pickup(sg, again);
                    break;
                }
                case SubgoalAction::PutObject:
                    put(sg);
                    last_put_instruction = sg.instruction;
                    break;
                default:
                    other(sg);
                    break;
            }
        }
        if (!check_goal(state_, task_).success) throw PlannerError("expert plan does not reach the goal");
        act(PrimitiveAction::make(ActionKind::Stop));
        return std::move(plan_);
    }

private:
    int cost(ObjectId id) const {
        const auto& o = state_.scene.object(id);
        if (!o.cell) return kUnreachable;
        const int c = face_cost(grid_, state_.agent, *o.cell);
        if (c == kUnreachable) return kUnreachable;
        return c + static_cast<int>(state_.scene.closed_chain(id).size());
    }

    ObjectId nearest(Category c, const std::set<ObjectId>& exclude) const {
        ObjectId best = -1;
        int best_cost = std::numeric_limits<int>::max();
        for (ObjectId id : state_.scene.instances_of(c)) {
            if (exclude.count(id) || state_.scene.object(id).held) continue;
            if (state_.held && inside(id, *state_.held)) continue;
            const int k = cost(id);
            if (k == kUnreachable) continue;
            if (k < best_cost) {
                best_cost = k;
                best = id;
            }
        }
        if (best < 0) throw PlannerError("no reachable " + std::string(name(c)));
        return best;
    }

    bool inside(ObjectId id, ObjectId holder) const {
        for (auto p = state_.scene.object(id).contained_in; p; p = state_.scene.object(*p).contained_in) {
            if (*p == holder) return true;
        }
        return false;
    }

    void act(const PrimitiveAction& a) {
        plan_.trajectory.push_back(a);
        const Event e = step(state_, a);
        if (!e.ok) throw PlannerError("expert action " + to_string(a) + " failed: " + e.message);
    }

    void interact(SubgoalAction action, ObjectId id, int instruction) {
        const auto& o = state_.scene.object(id);
        if (!o.cell) throw PlannerError("target has no cell");
        const Cell cell = *o.cell;
        plan_.subgoal_start.push_back(static_cast<int>(plan_.trajectory.size()));
        plan_.subgoals.push_back({action, o.category, cell, instruction});
        plan_.instances.push_back(id);
        const auto path = plan_to_face(grid_, state_.agent, cell);
        if (!path) throw PlannerError("cannot reach " + std::string(name(o.category)));
        for (ActionKind k : *path) act(PrimitiveAction::make(k));
        act(PrimitiveAction::make(*to_action_kind(action), o.category));
    }

    void open_chain(ObjectId id, int instruction) {
        for (ObjectId c : state_.scene.closed_chain(id)) interact(SubgoalAction::OpenObject, c, instruction);
    }

    void pickup(const Subgoal& sg, bool again) {
        ObjectId id;
        if (again) {
            id = *carried_;
        } else {
            id = nearest(sg.object, placed_);
        }
        open_chain(id, sg.instruction);
        interact(SubgoalAction::PickupObject, id, sg.instruction);
        carried_ = id;
    }

    void put(const Subgoal& sg) {
        if (!state_.held) throw PlannerError("put with empty hand");
        const ObjectId id = nearest(sg.object, {});
        open_chain(id, sg.instruction);
        const auto& r = state_.scene.object(id);
        if (info(r.category).openable && !r.open) interact(SubgoalAction::OpenObject, id, sg.instruction);
        placed_.insert(*state_.held);
        interact(SubgoalAction::PutObject, id, sg.instruction);
        last_put_ = id;
    }

    void other(const Subgoal& sg) {
        ObjectId id;
        if (last_put_ && state_.scene.object(*last_put_).category == sg.object) {
            id = *last_put_;
        } else {
            id = nearest(sg.object, {});
        }
        open_chain(id, sg.instruction);
        interact(sg.action, id, sg.instruction);
    }

    const TaskSpec& task_;
    WorldState state_;
    NavGrid grid_;
    ExpertPlan plan_;
    std::set<ObjectId> placed_;
    std::optional<ObjectId> carried_;
    std::optional<ObjectId> last_put_;
};

} // namespace

ExpertPlan expert_plan(const GridScene& scene, const TaskSpec& task) {
    return Expert(scene, task).run();
}

} // namespace taskgrid::world
