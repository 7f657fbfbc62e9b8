#pragma once

#include "localizer/dataset.hpp"
#include "world/scene.hpp"

#include <stdexcept>
#include <utility>
#include <vector>

namespace taskgrid::harness {

class CollectError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using SceneTask = std::pair<world::GridScene, world::TaskSpec>;

// Replays the expert in each scene after the same survey the agent runs and
// snapshots the map at the start of every expert subgoal, labelled with the
// cell of the instance it acts on. Throws CollectError("expert-failure")
// when the expert cannot solve a scene.
std::vector<localizer::TrainSample> collect_dataset(const std::vector<SceneTask>& scenes, int survey_budget = 300);

// Scene the expert starts from after surveying: same layout, moved spawn.
world::GridScene surveyed_scene(const world::GridScene& scene, int survey_budget);

} // namespace taskgrid::harness
