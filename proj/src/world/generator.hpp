#pragma once

#include "world/scene.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>

namespace taskgrid::world {

inline constexpr int kGridSize = 24;
inline constexpr int kLayoutVariants = 6;

inline int layout_variant_for_seed(std::uint64_t seed) {
    return static_cast<int>(seed % kLayoutVariants);
}

struct GeneratorOptions {
    // Force a task type; must be valid for the room (and for the hard split).
    std::optional<TaskType> task_type;
};

class GeneratorError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Deterministic in (seed, room, hard, options). With hard=true every
// goal-relevant pickupable starts inside a closed receptacle.
std::pair<GridScene, TaskSpec> generate_scene(std::uint64_t seed, RoomType room, bool hard,
                                              const GeneratorOptions& options = {});

// Task types the generator can build for a room (hard split: at most five).
std::vector<TaskType> task_types_for(RoomType room, bool hard);

// Checks the structural scene invariants; returns an empty string when
// they hold, otherwise a description of the first violation.
std::string validate_scene(const GridScene& scene);
// True when every instance of every goal-relevant pickupable is sealed.
bool goal_objects_sealed(const GridScene& scene, const TaskSpec& task);

} // namespace taskgrid::world
