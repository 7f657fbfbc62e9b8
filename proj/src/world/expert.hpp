#pragma once

#include "world/subgoal.hpp"
#include "world/world.hpp"

#include <stdexcept>
#include <vector>

namespace taskgrid::world {

class PlannerError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ExpertPlan {
    // Interaction-only subgoals, each with the cell it acts on.
    std::vector<Subgoal> subgoals;
    std::vector<ObjectId> instances;   // parallel to subgoals
    std::vector<PrimitiveAction> trajectory;   // ends with Stop
    // Index into trajectory where each subgoal's navigation begins.
    std::vector<int> subgoal_start;

    int length() const { return static_cast<int>(trajectory.size()); }
};

// Omniscient plan for the task from the scene's spawn pose. Includes the
// open steps that sparse instructions leave out. Throws PlannerError when
// the task cannot be completed.
ExpertPlan expert_plan(const GridScene& scene, const TaskSpec& task);

} // namespace taskgrid::world
