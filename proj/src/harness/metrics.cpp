#include "harness/metrics.hpp"

#include <algorithm>

namespace taskgrid::harness {

double plw_factor(int steps, int expert_length) {
    const int denom = std::max(steps, expert_length);
    return denom > 0 ? static_cast<double>(expert_length) / denom : 0.0;
}

Scores score(const std::vector<agent::EpisodeResult>& results) {
    Scores s;
    s.episodes = static_cast<int>(results.size());
    if (results.empty()) return s;
    long satisfied = 0;
    long total = 0;
    for (const auto& r : results) {
        const double f = plw_factor(r.steps, r.expert_length);
        const double gc = r.total > 0 ? static_cast<double>(r.satisfied) / r.total : 0.0;
        s.sr += r.success ? 1.0 : 0.0;
        s.plwsr += r.success ? f : 0.0;
        s.plwgc += gc * f;
        satisfied += r.satisfied;
        total += r.total;
    }
    const double n = static_cast<double>(results.size());
    s.sr /= n;
    s.plwsr /= n;
    s.plwgc /= n;
    s.gc = total > 0 ? static_cast<double>(satisfied) / static_cast<double>(total) : 0.0;
    return s;
}

Metrics compute_metrics(const std::vector<agent::EpisodeResult>& results) {
    if (results.empty()) throw MetricsError("empty-results: no episodes to score");
    Metrics m;
    m.overall = score(results);
    std::map<std::string, std::vector<agent::EpisodeResult>> groups;
    for (const auto& r : results) groups[r.task_type].push_back(r);
    for (const auto& [type, rs] : groups) m.by_task_type[type] = score(rs);
    for (auto mode : {agent::ErrorMode::None, agent::ErrorMode::GoalObjectNotFound,
                      agent::ErrorMode::InteractionFailure, agent::ErrorMode::NavigationFailure}) {
        m.error_modes[std::string(agent::error_mode_name(mode))] = 0;
    }
    for (const auto& r : results) ++m.error_modes[std::string(agent::error_mode_name(r.error_mode))];
    return m;
}

namespace {

nlohmann::json scores_json(const Scores& s) {
    return {{"episodes", s.episodes}, {"SR", s.sr}, {"GC", s.gc}, {"PLWSR", s.plwsr}, {"PLWGC", s.plwgc}};
}

} // namespace

nlohmann::json Metrics::to_json() const {
    nlohmann::json types = nlohmann::json::object();
    for (const auto& [k, v] : by_task_type) types[k] = scores_json(v);
    nlohmann::json j = scores_json(overall);
    j["by_task_type"] = types;
    j["error_modes"] = error_modes;
    return j;
}

} // namespace taskgrid::harness
