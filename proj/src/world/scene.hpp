#pragma once

#include "world/catalog.hpp"

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace taskgrid::world {

struct Cell {
    int row = 0;
    int col = 0;
    auto operator<=>(const Cell&) const = default;
};

inline int chebyshev(Cell a, Cell b) {
    const int dr = a.row > b.row ? a.row - b.row : b.row - a.row;
    const int dc = a.col > b.col ? a.col - b.col : b.col - a.col;
    return dr > dc ? dr : dc;
}

enum class Heading : std::uint8_t { N, E, S, W };
enum class Look : std::uint8_t { Up, Level, Down };

Cell step_toward(Cell c, Heading h);
Heading rotate_left(Heading h);
Heading rotate_right(Heading h);
std::string_view heading_name(Heading h);
std::optional<Heading> parse_heading(std::string_view text);

struct AgentPose {
    Cell cell;
    Heading heading = Heading::N;
    Look look = Look::Level;
    bool operator==(const AgentPose&) const = default;

    Cell faced() const { return step_toward(cell, heading); }
};

using ObjectId = int;

struct ObjectInstance {
    ObjectId id = 0;
    Category category = Category::Fridge;
    // Absent while the object (or an object containing it) is held.
    std::optional<Cell> cell;
    bool open = false;
    bool on = false;
    bool sliced = false;
    bool held = false;
    bool clean = false;
    bool hot = false;
    bool cold = false;
    std::optional<ObjectId> contained_in;

    bool operator==(const ObjectInstance&) const = default;
};

struct GridScene {
    int width = 24;
    int height = 24;
    // Row-major; true for structural walls. Furniture is tracked as objects.
    std::vector<bool> wall;
    std::vector<ObjectInstance> objects;   // index == id
    RoomType room_type = RoomType::Kitchen;
    std::uint64_t seed = 0;
    int layout_variant = 0;
    AgentPose spawn;

    bool in_bounds(Cell c) const { return c.row >= 0 && c.col >= 0 && c.row < height && c.col < width; }
    std::size_t cell_index(Cell c) const { return static_cast<std::size_t>(c.row * width + c.col); }
    bool is_wall(Cell c) const { return !in_bounds(c) || wall[cell_index(c)]; }
    // Floor cell with no furniture on it.
    bool walkable(Cell c) const;

    const ObjectInstance& object(ObjectId id) const { return objects.at(static_cast<std::size_t>(id)); }
    ObjectInstance& object(ObjectId id) { return objects.at(static_cast<std::size_t>(id)); }

    // True when some receptacle on the containment chain is closed.
    bool sealed(ObjectId id) const;
    // Closed openable receptacles enclosing `id`, outermost first.
    std::vector<ObjectId> closed_chain(ObjectId id) const;
    std::vector<ObjectId> instances_of(Category c) const;
    std::vector<ObjectId> objects_at(Cell c) const;

    bool operator==(const GridScene&) const = default;
};

enum class TaskType : std::uint8_t {
    Examine, PickPlace, StackPlace, CleanPlace, CoolPlace, HeatPlace, PickTwoPlace,
};
inline constexpr std::size_t kTaskTypeCount = 7;
std::string_view task_type_name(TaskType t);
std::optional<TaskType> parse_task_type(std::string_view text);

enum class ConditionKind : std::uint8_t { Placed, Held, ToggledOn, Cleaned, Heated, Cooled, Sliced };

struct GoalCondition {
    ConditionKind kind = ConditionKind::Placed;
    Category object = Category::Mug;
    std::optional<Category> receptacle;   // Placed only
    int count = 1;                        // Placed only
    std::optional<Category> containing;   // Placed: object must hold one of these
    bool need_clean = false;
    bool need_hot = false;
    bool need_cold = false;

    bool operator==(const GoalCondition&) const = default;
};

std::string describe(const GoalCondition& c);

struct TaskSpec {
    TaskType type = TaskType::PickPlace;
    std::string goal_statement;
    std::vector<std::string> step_instructions;
    std::vector<GoalCondition> goal_conditions;
    bool hard = false;
    // The category whose visibility decides the goal-object-not-found mode.
    Category goal_object = Category::Mug;

    bool operator==(const TaskSpec&) const = default;
};

} // namespace taskgrid::world
