#include "harness/collect.hpp"

#include "agent/agent.hpp"
#include "localizer/model.hpp"
#include "world/expert.hpp"

namespace taskgrid::harness {

using namespace world;

namespace {

struct Replay {
    GridScene start;
    mapper::SemanticMap map;
};

Replay survey_from_spawn(const GridScene& scene, int budget) {
    WorldState state = WorldState::start(scene);
    mapper::SemanticMap map(scene.height, scene.width);
    mapper::update(map, observe(state));
    if (budget > 0) agent::survey(state, map, budget);
    GridScene moved = scene;
    moved.spawn = state.agent;
    return {moved, map};
}

} // namespace

GridScene surveyed_scene(const GridScene& scene, int survey_budget) {
    return survey_from_spawn(scene, survey_budget).start;
}

std::vector<localizer::TrainSample> collect_dataset(const std::vector<SceneTask>& scenes, int survey_budget) {
    std::vector<localizer::TrainSample> out;
    for (const auto& [scene, task] : scenes) {
        Replay replay = survey_from_spawn(scene, survey_budget);
        ExpertPlan plan;
        try {
            plan = expert_plan(replay.start, task);
        } catch (const PlannerError& e) {
            throw CollectError("expert-failure: seed " + std::to_string(scene.seed) + ": " + e.what());
        }
        WorldState state = WorldState::start(replay.start);
        std::size_t next = 0;
        for (int i = 0; i < plan.length(); ++i) {
            while (next < plan.subgoals.size() && plan.subgoal_start[next] == i) {
                const Subgoal& sg = plan.subgoals[next];
                localizer::TrainSample s;
                s.map = replay.map;
                s.subgoal = sg;
                s.text = localizer::localizer_text(sg, localizer::subgoal_sentence(task, sg));
                s.gt_cells = {*sg.position};
                s.scene_seed = scene.seed;
                s.room = scene.room_type;
                s.hard = task.hard;
                out.push_back(std::move(s));
                ++next;
            }
            const Event e = step(state, plan.trajectory[static_cast<std::size_t>(i)]);
            if (!e.ok) throw CollectError("expert-failure: seed " + std::to_string(scene.seed) + ": " + e.message);
            mapper::update(replay.map, observe(state));
        }
    }
    return out;
}

} // namespace taskgrid::harness
