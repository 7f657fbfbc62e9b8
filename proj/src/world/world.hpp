#pragma once

#include "world/scene.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace taskgrid::world {

enum class ActionKind : std::uint8_t {
    MoveAhead, RotateLeft, RotateRight, LookUp, LookDown,
    PickupObject, PutObject, OpenObject, CloseObject,
    ToggleObjectOn, ToggleObjectOff, SliceObject, Stop,
};
inline constexpr std::size_t kActionCount = 13;

bool is_interaction(ActionKind k);
std::string_view action_name(ActionKind k);
std::optional<ActionKind> parse_action(std::string_view text);

class ActionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct PrimitiveAction {
    ActionKind kind = ActionKind::Stop;
    std::optional<Category> target;   // set iff kind is an interaction

    // Throws ActionError when the target/kind pairing is invalid.
    static PrimitiveAction make(ActionKind kind, std::optional<Category> target = std::nullopt);
    bool operator==(const PrimitiveAction&) const = default;
};

std::string to_string(const PrimitiveAction& a);

struct Event {
    bool ok = true;
    std::string message;
};

inline constexpr int kMaxSteps = 1000;
inline constexpr int kMaxErrors = 10;
inline constexpr int kViewRange = 5;

struct WorldState {
    GridScene scene;
    AgentPose agent;
    std::optional<ObjectId> held;
    int steps = 0;
    int errors = 0;
    bool terminated = false;
    bool stopped = false;
    std::string last_event;

    static WorldState start(GridScene scene);
    bool operator==(const WorldState&) const = default;
};

// Advances the world by one primitive action. Failures are counted and
// reported through the event; the call itself never throws.
Event step(WorldState& state, const PrimitiveAction& action);

struct ObservedInstance {
    Cell cell;
    Category category;
    bool open = false;
    bool on = false;
    bool sliced = false;
    bool operator==(const ObservedInstance&) const = default;
};

struct ObservedCell {
    Cell cell;
    bool obstacle = false;
    bool operator==(const ObservedCell&) const = default;
};

struct EgocentricObservation {
    AgentPose pose;
    std::vector<ObservedCell> cells;
    std::vector<ObservedInstance> instances;
};

// Cells in a 90 degree cone of range 5 ahead of the agent, with sight lines
// blocked by walls. Objects inside closed receptacles are never reported.
EgocentricObservation observe(const WorldState& state);
std::vector<Cell> visible_cells(const GridScene& scene, const AgentPose& pose);

struct GoalReport {
    std::vector<bool> satisfied;
    int satisfied_count = 0;
    int total = 0;
    bool success = false;
};

GoalReport check_goal(const WorldState& state, const TaskSpec& task);
bool condition_holds(const WorldState& state, const GoalCondition& c);

} // namespace taskgrid::world
