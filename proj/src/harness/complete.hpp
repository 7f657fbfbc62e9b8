#pragma once

#include "world/scene.hpp"

#include <nlohmann/json.hpp>
#include <string>

namespace taskgrid::harness {

// Renders the prompt for `subgoal` as seen from the spawn pose, asks the
// backend once and parses the reply. Returns {prompt_hash, system, agent,
// response, reasoning, subgoals}; throws on parse or backend errors.
nlohmann::json complete_once(const world::GridScene& scene, const world::TaskSpec& task, const std::string& subgoal,
                             const std::string& backend_spec, const std::string& last_message = "");

} // namespace taskgrid::harness
