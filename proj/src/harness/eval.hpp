#pragma once

#include "agent/agent.hpp"
#include "harness/collect.hpp"
#include "harness/metrics.hpp"
#include "world/scene.hpp"

#include <filesystem>
#include <nlohmann/json.hpp>
#include <stdexcept>
#include <string>
#include <vector>

namespace taskgrid::harness {

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct SeedRange {
    std::uint64_t begin = 0;
    std::uint64_t end = 0;   // exclusive
};

struct EvalConfig {
    std::string split = "valid_unseen";   // train | valid_seen | valid_unseen
    SeedRange train{0, 100000};
    SeedRange valid_seen{100000, 200000};
    SeedRange valid_unseen{200000, 300000};
    // Layout variants reserved for the unseen split.
    std::vector<int> unseen_layouts{4, 5};
    double hard_fraction = 0.086;
    int episodes = 50;
    std::uint64_t seed = 0;   // offset into the split's seed range

    bool use_completer = true;
    bool use_localizer = true;
    bool use_graph = true;
    bool ground_truth_positions = false;
    double tau = 0.2;
    int max_completer_calls = 3;
    int survey_budget = 300;
    std::string backend = "oracle";
    std::string checkpoint;   // relative paths resolve against the base dir

    int workers = 1;
    std::string output = "results.json";

    // Throws ConfigError ("config-invalid: ...").
    void validate() const;
    static EvalConfig from_json(const nlohmann::json& j);
    // Everything that affects results; excludes workers and output.
    nlohmann::json to_json() const;
    std::string hash() const;
};

struct EpisodeSpec {
    std::uint64_t seed = 0;
    world::RoomType room = world::RoomType::Kitchen;
    bool hard = false;
};

// Seeds of the split in order, skipping layouts that belong to the other
// side of the seen/unseen partition; the hard flag follows hard_fraction.
std::vector<EpisodeSpec> episode_specs(const EvalConfig& config);

// Scenes and tasks for every episode of the split.
std::vector<SceneTask> generate_scenes(const EvalConfig& config);

struct EvalOutput {
    std::vector<agent::EpisodeResult> results;
    Metrics metrics;
    nlohmann::json document;
};

EvalOutput run_eval(const EvalConfig& config, const std::filesystem::path& base_dir = ".");

// Markdown tables (overall, per task type, error modes) from a results document.
std::string render_report(const nlohmann::json& document);

} // namespace taskgrid::harness
