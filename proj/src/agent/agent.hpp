#pragma once

#include "completer/backend.hpp"
#include "localizer/model.hpp"
#include "mapper/semantic_map.hpp"
#include "world/navigation.hpp"
#include "world/world.hpp"

#include <nlohmann/json.hpp>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace taskgrid::agent {

using world::Cell;
using world::Subgoal;

struct AgentConfig {
    bool use_completer = true;
    bool use_localizer = true;
    // Informational; the graph switch lives in the localizer checkpoint.
    bool use_graph = true;
    // Inject expert (ground-truth) positions instead of localizing.
    bool ground_truth_positions = false;
    const localizer::LocalizerModel* localizer = nullptr;
    double tau = 0.2;
    int max_completer_calls = 3;
    // Steps spent mapping the room before the first subgoal; 0 disables.
    int survey_budget = 300;
};

enum class ErrorMode { None, GoalObjectNotFound, InteractionFailure, NavigationFailure };
std::string_view error_mode_name(ErrorMode m);
std::optional<ErrorMode> parse_error_mode(std::string_view text);

struct SubgoalRecord {
    std::string subgoal;
    std::string source;   // "instruction" or "completer"
    std::optional<Cell> target;
    bool ok = false;
    std::string message;
    int step = 0;
};

struct EpisodeResult {
    std::uint64_t seed = 0;
    std::string room;
    std::string task_type;
    bool hard = false;
    bool success = false;
    int satisfied = 0;
    int total = 0;
    int steps = 0;            // L
    int expert_length = 0;    // L*
    int errors = 0;
    ErrorMode error_mode = ErrorMode::None;
    int completer_calls = 0;
    int recovered_subgoals = 0;
    std::vector<std::string> trajectory;
    std::vector<SubgoalRecord> subgoal_log;

    nlohmann::json to_json() const;
    static EpisodeResult from_json(const nlohmann::json& j);
};

class MapFullyExplored : public std::runtime_error {
public:
    MapFullyExplored() : std::runtime_error("map-fully-explored") {}
};

// Planning grid from the agent's map: explored, obstacle-free cells.
world::NavGrid known_grid(const mapper::SemanticMap& map);

// Shortest move/rotate sequence over known free cells ending adjacent to and
// facing `to`; nullopt when unreachable.
std::optional<std::vector<world::ActionKind>> plan_path(const mapper::SemanticMap& map, const world::AgentPose& from,
                                                        Cell to);

// Nearest known free cell (by path length, then row-major) with an
// unexplored neighbour. Throws MapFullyExplored when there is none.
Cell explore_frontier(const mapper::SemanticMap& map, const world::AgentPose& pose);

// Rotates in place and then visits frontiers until none is left or the
// budget of steps is spent. Returns the number of steps taken.
int survey(world::WorldState& state, mapper::SemanticMap& map, int budget);

// Runs one episode. `backend` may be null when the completer is off.
EpisodeResult run_episode(const world::GridScene& scene, const world::TaskSpec& task, const AgentConfig& config,
                          completer::Backend* backend);

} // namespace taskgrid::agent
