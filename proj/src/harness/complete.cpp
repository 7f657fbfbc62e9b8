#include "harness/complete.hpp"

#include "completer/backend.hpp"
#include "completer/parser.hpp"
#include "completer/prompt.hpp"
#include "mapper/semantic_map.hpp"

#include <stdexcept>

namespace taskgrid::harness {

using namespace world;

nlohmann::json complete_once(const GridScene& scene, const TaskSpec& task, const std::string& subgoal,
                             const std::string& backend_spec, const std::string& last_message) {
    auto current = parse_subgoal(subgoal);
    if (!current) throw std::invalid_argument("cannot parse subgoal '" + subgoal + "'");
    const WorldState state = WorldState::start(scene);
    mapper::SemanticMap map(scene.height, scene.width);
    mapper::update(map, observe(state));
    std::vector<std::string> possible;
    for (Category c : possible_landmarks(scene.room_type)) possible.emplace_back(name(c));
    completer::TaskProgress progress;
    progress.current = *current;
    progress.all = parse_instructions(task.step_instructions);
    completer::CompletionRequest req;
    req.bundle = completer::build_prompt(completer::Templates::defaults(), task, progress,
                                         mapper::landmark_names(mapper::observed_landmarks(map)), possible,
                                         last_message);
    req.current = *current;
    req.truth = &state;
    const auto backend = completer::make_backend(backend_spec);
    const std::string response = backend->complete(req);
    const auto parsed = completer::parse_response(response, possible, *current);
    nlohmann::json subgoals = nlohmann::json::array();
    for (const auto& s : parsed.subgoals) subgoals.push_back(to_string(s));
    return {{"prompt_hash", completer::prompt_hash(req.bundle)},
            {"system", req.bundle.system_message},
            {"agent", req.bundle.agent_message},
            {"response", response},
            {"reasoning", parsed.reasoning},
            {"subgoals", subgoals}};
}

} // namespace taskgrid::harness
