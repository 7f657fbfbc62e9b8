#pragma once

#include "world/scene.hpp"
#include "world/world.hpp"

#include <optional>
#include <vector>

namespace taskgrid::world {

// Occupancy view used for planning: true where the agent may stand.
struct NavGrid {
    int width = 0;
    int height = 0;
    std::vector<bool> free;

    bool in_bounds(Cell c) const { return c.row >= 0 && c.col >= 0 && c.row < height && c.col < width; }
    bool passable(Cell c) const { return in_bounds(c) && free[static_cast<std::size_t>(c.row * width + c.col)]; }
};

NavGrid nav_grid(const GridScene& scene);

inline constexpr int kUnreachable = -1;

// 4-connected BFS distances (in cells) from `from`; kUnreachable elsewhere.
std::vector<int> distance_field(const NavGrid& grid, Cell from);

// Shortest MoveAhead/RotateLeft/RotateRight sequence that ends on a
// passable cell orthogonally adjacent to `target`, facing it. Empty when
// already in place; nullopt when unreachable.
std::optional<std::vector<ActionKind>> plan_to_face(const NavGrid& grid, const AgentPose& from, Cell target);

// Shortest sequence that ends standing on `cell` (any heading).
std::optional<std::vector<ActionKind>> plan_to_stand(const NavGrid& grid, const AgentPose& from, Cell cell);

// Number of primitive actions in the shortest plan_to_face, or kUnreachable.
int face_cost(const NavGrid& grid, const AgentPose& from, Cell target);

} // namespace taskgrid::world
