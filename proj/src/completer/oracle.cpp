#include "completer/oracle.hpp"

#include <algorithm>
#include <limits>

namespace taskgrid::completer {

using world::SubgoalAction;

namespace {

bool inside(const world::GridScene& s, world::ObjectId id, world::ObjectId holder) {
    for (auto p = s.object(id).contained_in; p; p = s.object(*p).contained_in) {
        if (*p == holder) return true;
    }
    return false;
}

} // namespace

CompletionResponse oracle_complete(const world::WorldState& truth, const Subgoal& current,
                                   const std::vector<world::Cell>& exclude) {
    const auto& s = truth.scene;
    std::optional<world::ObjectId> best;
    std::size_t best_cost = std::numeric_limits<std::size_t>::max();
    for (world::ObjectId id : s.instances_of(current.object)) {
        const auto& o = s.object(id);
        if (o.held || !o.cell) continue;
        if (truth.held && inside(s, id, *truth.held)) continue;
        if (current.action == SubgoalAction::PickupObject &&
            std::find(exclude.begin(), exclude.end(), *o.cell) != exclude.end()) {
            continue;
        }
        std::size_t cost = s.closed_chain(id).size();
        if (current.action == SubgoalAction::PutObject && world::info(o.category).openable && !o.open) ++cost;
        if (cost < best_cost) {
            best_cost = cost;
            best = id;
        }
    }
    if (!best) {
        throw CompleterError(CompleterError::Kind::TargetAbsent,
                             "target-absent: no " + std::string(world::name(current.object)) + " in the scene");
    }
    CompletionResponse r;
    std::vector<world::ObjectId> to_open = s.closed_chain(*best);
    const auto& target = s.object(*best);
    if (current.action == SubgoalAction::PutObject && world::info(target.category).openable && !target.open) {
        to_open.push_back(*best);
    }
    std::string reason;
    for (world::ObjectId id : to_open) {
        const auto& c = s.object(id);
        r.subgoals.push_back({SubgoalAction::GotoLocation, c.category, c.cell, current.instruction});
        r.subgoals.push_back({SubgoalAction::OpenObject, c.category, c.cell, current.instruction});
        reason += "The " + std::string(world::name(c.category)) + " is closed, so it has to be opened first. ";
    }
    Subgoal last = current;
    last.position = target.cell;
    r.subgoals.push_back(last);
    r.reasoning = reason.empty() ? "Nothing is missing before " + world::to_string(current) + "."
                                 : reason.substr(0, reason.size() - 1);
    return r;
}

} // namespace taskgrid::completer
