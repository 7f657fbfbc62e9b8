#include "harness/eval.hpp"

#include "completer/prompt.hpp"
#include "localizer/model.hpp"
#include "world/expert.hpp"
#include "world/generator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>

namespace taskgrid::harness {

using nlohmann::json;

namespace {

const SeedRange& range_of(const EvalConfig& c) {
    if (c.split == "train") return c.train;
    if (c.split == "valid_seen") return c.valid_seen;
    return c.valid_unseen;
}

bool overlaps(SeedRange a, SeedRange b) { return a.begin < b.end && b.begin < a.end; }

json range_json(SeedRange r) { return json::array({r.begin, r.end}); }

SeedRange range_from(const json& j, SeedRange fallback) {
    if (j.is_null()) return fallback;
    return {j.at(0).get<std::uint64_t>(), j.at(1).get<std::uint64_t>()};
}

} // namespace

void EvalConfig::validate() const {
    auto fail = [](const std::string& why) { throw ConfigError("config-invalid: " + why); };
    if (split != "train" && split != "valid_seen" && split != "valid_unseen") fail("unknown split '" + split + "'");
    for (SeedRange r : {train, valid_seen, valid_unseen}) {
        if (r.end <= r.begin) fail("empty seed range");
    }
    if (overlaps(train, valid_seen) || overlaps(train, valid_unseen) || overlaps(valid_seen, valid_unseen)) {
        fail("seed ranges overlap");
    }
    if (unseen_layouts.empty() || unseen_layouts.size() >= static_cast<std::size_t>(world::kLayoutVariants)) {
        fail("unseen_layouts must be a proper, non-empty subset of the layout variants");
    }
    for (int v : unseen_layouts) {
        if (v < 0 || v >= world::kLayoutVariants) fail("bad layout variant " + std::to_string(v));
    }
    if (episodes <= 0) fail("empty split: episodes must be positive");
    if (!(hard_fraction >= 0.0 && hard_fraction <= 1.0)) fail("hard_fraction outside [0, 1]");
    if (!(tau >= 0.0 && tau <= 1.0)) fail("tau outside [0, 1]");
    if (max_completer_calls < 0) fail("max_completer_calls is negative");
    if (survey_budget < 0) fail("survey_budget is negative");
    if (workers < 1) fail("workers must be at least 1");
    if (use_completer && backend.empty()) fail("use_completer needs a backend");
}

EvalConfig EvalConfig::from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("config-invalid: not a JSON object");
    EvalConfig c;
    try {
        c.split = j.value("split", c.split);
        const json splits = j.value("splits", json::object());
        c.train = range_from(splits.value("train", json()), c.train);
        c.valid_seen = range_from(splits.value("valid_seen", json()), c.valid_seen);
        c.valid_unseen = range_from(splits.value("valid_unseen", json()), c.valid_unseen);
        c.unseen_layouts = j.value("unseen_layouts", c.unseen_layouts);
        c.hard_fraction = j.value("hard_fraction", c.hard_fraction);
        c.episodes = j.value("episodes", c.episodes);
        c.seed = j.value("seed", c.seed);
        const json a = j.value("agent", json::object());
        c.use_completer = a.value("use_completer", c.use_completer);
        c.use_localizer = a.value("use_localizer", c.use_localizer);
        c.use_graph = a.value("use_graph", c.use_graph);
        c.ground_truth_positions = a.value("ground_truth_positions", c.ground_truth_positions);
        c.tau = a.value("tau", c.tau);
        c.max_completer_calls = a.value("max_completer_calls", c.max_completer_calls);
        c.survey_budget = a.value("survey_budget", c.survey_budget);
        c.backend = a.value("backend", c.backend);
        c.checkpoint = a.value("checkpoint", c.checkpoint);
        c.workers = j.value("workers", c.workers);
        c.output = j.value("output", c.output);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config-invalid: ") + e.what());
    }
    c.validate();
    return c;
}

json EvalConfig::to_json() const {
    return {{"split", split},
            {"splits", {{"train", range_json(train)}, {"valid_seen", range_json(valid_seen)},
                        {"valid_unseen", range_json(valid_unseen)}}},
            {"unseen_layouts", unseen_layouts},
            {"hard_fraction", hard_fraction},
            {"episodes", episodes},
            {"seed", seed},
            {"agent", {{"use_completer", use_completer},
                       {"use_localizer", use_localizer},
                       {"use_graph", use_graph},
                       {"ground_truth_positions", ground_truth_positions},
                       {"tau", tau},
                       {"max_completer_calls", max_completer_calls},
                       {"survey_budget", survey_budget},
                       {"backend", backend},
                       {"checkpoint", checkpoint}}}};
}

std::string EvalConfig::hash() const { return completer::sha256_hex(to_json().dump()); }

std::vector<EpisodeSpec> episode_specs(const EvalConfig& config) {
    config.validate();
    const SeedRange r = range_of(config);
    const bool unseen = config.split == "valid_unseen";
    auto wanted = [&](std::uint64_t s) {
        const int v = world::layout_variant_for_seed(s);
        const bool reserved =
            std::find(config.unseen_layouts.begin(), config.unseen_layouts.end(), v) != config.unseen_layouts.end();
        return reserved == unseen;
    };
    std::vector<EpisodeSpec> out;
    for (std::uint64_t s = r.begin + config.seed; s < r.end && static_cast<int>(out.size()) < config.episodes; ++s) {
        if (!wanted(s)) continue;
        const std::size_t i = out.size();
        const double f = config.hard_fraction;
        const bool hard = std::floor(static_cast<double>(i + 1) * f) > std::floor(static_cast<double>(i) * f);
        out.push_back({s, world::kRoomTypes[i % world::kRoomTypes.size()], hard});
    }
    if (static_cast<int>(out.size()) < config.episodes) {
        throw ConfigError("config-invalid: split has fewer seeds than requested episodes");
    }
    return out;
}

std::vector<SceneTask> generate_scenes(const EvalConfig& config) {
    std::vector<SceneTask> out;
    for (const auto& spec : episode_specs(config)) out.push_back(world::generate_scene(spec.seed, spec.room, spec.hard));
    return out;
}

EvalOutput run_eval(const EvalConfig& config, const std::filesystem::path& base_dir) {
    const auto specs = episode_specs(config);
    if (config.use_localizer && !config.ground_truth_positions && config.checkpoint.empty()) {
        throw ConfigError("config-invalid: use_localizer needs a checkpoint");
    }
    std::unique_ptr<localizer::LocalizerModel> model;
    if (config.use_localizer && !config.checkpoint.empty()) {
        std::filesystem::path p = config.checkpoint;
        if (p.is_relative()) p = base_dir / p;
        model = std::make_unique<localizer::LocalizerModel>(localizer::LocalizerModel::load(p.string()));
        if (model->config().use_graph != config.use_graph) {
            throw ConfigError("config-invalid: checkpoint graph setting does not match use_graph");
        }
    }
    std::unique_ptr<completer::Backend> backend;
    if (config.use_completer) {
        std::string spec = config.backend;
        const std::string prefix = "scripted:";
        if (spec.rfind(prefix, 0) == 0) {
            std::filesystem::path p = spec.substr(prefix.size());
            if (p.is_relative()) p = base_dir / p;
            spec = prefix + p.string();
        }
        backend = completer::make_backend(spec);
    }
    agent::AgentConfig ac;
    ac.use_completer = config.use_completer;
    ac.use_localizer = config.use_localizer;
    ac.use_graph = config.use_graph;
    ac.ground_truth_positions = config.ground_truth_positions;
    ac.localizer = model.get();
    ac.tau = config.tau;
    ac.max_completer_calls = config.max_completer_calls;
    ac.survey_budget = config.survey_budget;

    std::vector<agent::EpisodeResult> results(specs.size());
    auto run_one = [&](std::size_t i) {
        const auto [scene, task] = world::generate_scene(specs[i].seed, specs[i].room, specs[i].hard);
        const int expert_length = world::expert_plan(scene, task).length();
        results[i] = agent::run_episode(scene, task, ac, backend.get());
        results[i].expert_length = expert_length;
    };
    const int workers = std::min<int>(config.workers, static_cast<int>(specs.size()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < specs.size(); ++i) run_one(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < specs.size(); i = next++) {
                    try {
                        run_one(i);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                    }
                }
            });
        }
        for (auto& t : pool) t.join();
        if (failure) std::rethrow_exception(failure);
    }

    EvalOutput out;
    out.results = results;
    out.metrics = compute_metrics(results);
    json episodes = json::array();
    for (const auto& r : results) episodes.push_back(r.to_json());
    out.document = {{"config_hash", config.hash()},
                    {"config", config.to_json()},
                    {"metrics", out.metrics.to_json()},
                    {"episodes", episodes}};
    return out;
}

namespace {

std::string pct(double v) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(2) << 100.0 * v;
    return s.str();
}

std::string row(const std::string& label, const json& m) {
    return "| " + label + " | " + std::to_string(m.at("episodes").get<int>()) + " | " + pct(m.at("SR").get<double>()) +
           " | " + pct(m.at("GC").get<double>()) + " | " + pct(m.at("PLWSR").get<double>()) + " | " +
           pct(m.at("PLWGC").get<double>()) + " |\n";
}

} // namespace

std::string render_report(const json& document) {
    const json& m = document.at("metrics");
    const json& cfg = document.at("config");
    std::string out = "# Evaluation report\n\n";
    out += "split: " + cfg.at("split").get<std::string>() + ", config " + document.at("config_hash").get<std::string>().substr(0, 12) + "\n\n";
    const std::string header = "| | episodes | SR | GC | PLWSR | PLWGC |\n|---|---|---|---|---|---|\n";
    out += "## Overall\n\n" + header + row("all", m) + "\n";
    out += "## By task type\n\n" + header;
    for (const auto& [type, v] : m.at("by_task_type").items()) out += row(type, v);
    out += "\n## Error modes\n\n| mode | episodes | share |\n|---|---|---|\n";
    const int total = m.at("episodes").get<int>();
    for (const auto& [mode, count] : m.at("error_modes").items()) {
        const int n = count.get<int>();
        out += "| " + mode + " | " + std::to_string(n) + " | " + pct(total ? static_cast<double>(n) / total : 0.0) + " |\n";
    }
    return out;
}

} // namespace taskgrid::harness
