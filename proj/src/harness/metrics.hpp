#pragma once

#include "agent/agent.hpp"

#include <map>
#include <nlohmann/json.hpp>
#include <stdexcept>
#include <string>
#include <vector>

namespace taskgrid::harness {

class MetricsError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct Scores {
    int episodes = 0;
    double sr = 0.0;
    double gc = 0.0;
    double plwsr = 0.0;
    double plwgc = 0.0;
};

struct Metrics {
    Scores overall;
    std::map<std::string, Scores> by_task_type;
    std::map<std::string, int> error_modes;   // every mode present, zero if unseen

    nlohmann::json to_json() const;
};

// L* / max(L, L*); 0 when neither length is positive.
double plw_factor(int steps, int expert_length);

Scores score(const std::vector<agent::EpisodeResult>& results);
// Throws MetricsError("empty-results") on an empty list.
Metrics compute_metrics(const std::vector<agent::EpisodeResult>& results);

} // namespace taskgrid::harness
