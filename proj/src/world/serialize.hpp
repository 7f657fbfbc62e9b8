#pragma once

#include "world/scene.hpp"

#include <nlohmann/json.hpp>
#include <stdexcept>
#include <string>
#include <utility>

namespace taskgrid::world {

inline constexpr int kSceneFormatVersion = 1;

class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

nlohmann::json scene_to_json(const GridScene& scene, const TaskSpec& task);
std::pair<GridScene, TaskSpec> scene_from_json(const nlohmann::json& j);

nlohmann::json task_to_json(const TaskSpec& task);
TaskSpec task_from_json(const nlohmann::json& j);

std::string_view condition_kind_name(ConditionKind k);

} // namespace taskgrid::world
