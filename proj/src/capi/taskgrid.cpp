#include "taskgrid/taskgrid.h"

#include "completer/oracle.hpp"
#include "completer/parser.hpp"
#include "completer/prompt.hpp"
#include "harness/collect.hpp"
#include "harness/complete.hpp"
#include "harness/eval.hpp"
#include "harness/training.hpp"
#include "localizer/dataset.hpp"
#include "localizer/model.hpp"
#include "tensor/checkpoint.hpp"
#include "world/expert.hpp"
#include "world/generator.hpp"
#include "world/serialize.hpp"

#include <cstring>
#include <fstream>
#include <string>

using namespace taskgrid;

struct tg_scene {
    world::GridScene scene;
    world::TaskSpec task;
};

struct tg_localizer {
    localizer::LocalizerModel model;
};

namespace {

thread_local std::string g_last_error;

tg_status fail(tg_status code, const std::string& message) {
    g_last_error = message;
    return code;
}

char* dup(const std::string& s) {
    char* p = static_cast<char*>(std::malloc(s.size() + 1));
    if (p) std::memcpy(p, s.c_str(), s.size() + 1);
    return p;
}

// Maps exceptions from the core onto status codes.
template <class F>
tg_status guarded(F&& f) {
    try {
        f();
        g_last_error.clear();
        return TG_OK;
    } catch (const harness::ConfigError& e) {
        return fail(TG_ERR_CONFIG, e.what());
    } catch (const completer::CompleterError& e) {
        return fail(TG_ERR_COMPLETER, e.what());
    } catch (const completer::ParseError& e) {
        return fail(TG_ERR_COMPLETER, e.what());
    } catch (const world::FormatError& e) {
        return fail(TG_ERR_FORMAT, e.what());
    } catch (const tensor::CheckpointError& e) {
        const std::string what = e.what();
        return fail(what.rfind("cannot ", 0) == 0 ? TG_ERR_IO : TG_ERR_FORMAT, what);
    } catch (const nlohmann::json::exception& e) {
        return fail(TG_ERR_FORMAT, e.what());
    } catch (const std::invalid_argument& e) {
        return fail(TG_ERR_ARGUMENT, e.what());
    } catch (const std::ios_base::failure& e) {
        return fail(TG_ERR_IO, e.what());
    } catch (const std::exception& e) {
        const std::string what = e.what();
        if (what.rfind("cannot read", 0) == 0 || what.rfind("cannot write", 0) == 0) return fail(TG_ERR_IO, what);
        return fail(TG_ERR_RUNTIME, what);
    } catch (...) {
        return fail(TG_ERR_RUNTIME, "unknown error");
    }
}

#define TG_REQUIRE(cond)                                                      \
    do {                                                                      \
        if (!(cond)) return fail(TG_ERR_ARGUMENT, "null argument: " #cond);   \
    } while (0)

std::vector<harness::SceneTask> read_scenes(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::vector<harness::SceneTask> out;
    for (std::string line; std::getline(in, line);) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        out.push_back(world::scene_from_json(nlohmann::json::parse(line)));
    }
    return out;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

} // namespace

extern "C" {

const char* tg_version(void) { return "0.1.0"; }

const char* tg_last_error(void) { return g_last_error.c_str(); }

void tg_string_free(char* s) { std::free(s); }

tg_status tg_scene_generate(uint64_t seed, const char* room, int hard, tg_scene** out) {
    TG_REQUIRE(room && out);
    return guarded([&] {
        const auto r = world::parse_room(room);
        if (!r) throw std::invalid_argument(std::string("unknown room type '") + room + "'");
        auto [scene, task] = world::generate_scene(seed, *r, hard != 0);
        *out = new tg_scene{std::move(scene), std::move(task)};
    });
}

tg_status tg_scene_from_json(const char* json, tg_scene** out) {
    TG_REQUIRE(json && out);
    return guarded([&] {
        auto [scene, task] = world::scene_from_json(nlohmann::json::parse(json));
        *out = new tg_scene{std::move(scene), std::move(task)};
    });
}

tg_status tg_scene_to_json(const tg_scene* scene, char** out) {
    TG_REQUIRE(scene && out);
    return guarded([&] { *out = dup(world::scene_to_json(scene->scene, scene->task).dump()); });
}

tg_status tg_scene_expert_length(const tg_scene* scene, int* out) {
    TG_REQUIRE(scene && out);
    return guarded([&] { *out = world::expert_plan(scene->scene, scene->task).length(); });
}

void tg_scene_free(tg_scene* scene) { delete scene; }

tg_status tg_generate_scenes(const char* eval_config_json, const char* out_path, int* count) {
    TG_REQUIRE(eval_config_json && out_path);
    return guarded([&] {
        const auto config = harness::EvalConfig::from_json(nlohmann::json::parse(eval_config_json));
        const auto scenes = harness::generate_scenes(config);
        std::string text;
        for (const auto& [scene, task] : scenes) text += world::scene_to_json(scene, task).dump() + "\n";
        write_text(out_path, text);
        if (count) *count = static_cast<int>(scenes.size());
    });
}

tg_status tg_collect_dataset(const char* scenes_path, int survey_budget, const char* out_path, int* records) {
    TG_REQUIRE(scenes_path && out_path);
    return guarded([&] {
        const auto samples = harness::collect_dataset(read_scenes(scenes_path), survey_budget);
        localizer::write_dataset(out_path, samples);
        if (records) *records = static_cast<int>(samples.size());
    });
}

tg_status tg_localizer_create(const char* config_json, tg_localizer** out) {
    TG_REQUIRE(out);
    return guarded([&] {
        localizer::LocalizerConfig config;
        if (config_json && *config_json) config = localizer::LocalizerConfig::from_json(nlohmann::json::parse(config_json));
        *out = new tg_localizer{localizer::LocalizerModel(config)};
    });
}

tg_status tg_localizer_load(const char* path, tg_localizer** out) {
    TG_REQUIRE(path && out);
    return guarded([&] { *out = new tg_localizer{localizer::LocalizerModel::load(path)}; });
}

tg_status tg_localizer_save(const tg_localizer* model, const char* path) {
    TG_REQUIRE(model && path);
    return guarded([&] { model->model.save(path); });
}

tg_status tg_localizer_train(tg_localizer* model, const char* dataset_path, const char* train_config_json,
                             const char* log_path, char** summary) {
    TG_REQUIRE(model && dataset_path);
    return guarded([&] {
        harness::TrainingRun run;
        if (train_config_json && *train_config_json) {
            run = harness::TrainingRun::from_json(nlohmann::json::parse(train_config_json));
        }
        const auto samples = localizer::read_dataset(dataset_path);
        std::string csv = "epoch,loss\n";
        const auto report = harness::train_localizer(model->model, samples, run, [&](const localizer::EpochLog& e) {
            csv += std::to_string(e.epoch) + "," + std::to_string(e.loss) + "\n";
        });
        if (log_path) write_text(log_path, csv);
        if (summary) *summary = dup(report.to_json().dump(2));
    });
}

void tg_localizer_free(tg_localizer* model) { delete model; }

tg_status tg_run_eval(const char* eval_config_json, const char* base_dir, char** results) {
    TG_REQUIRE(eval_config_json && results);
    return guarded([&] {
        const auto config = harness::EvalConfig::from_json(nlohmann::json::parse(eval_config_json));
        const auto out = harness::run_eval(config, base_dir ? base_dir : ".");
        *results = dup(out.document.dump(2) + "\n");
    });
}

tg_status tg_report(const char* results_json, char** markdown) {
    TG_REQUIRE(results_json && markdown);
    return guarded([&] { *markdown = dup(harness::render_report(nlohmann::json::parse(results_json))); });
}

tg_status tg_complete(const tg_scene* scene, const char* subgoal, const char* backend, char** out) {
    TG_REQUIRE(scene && subgoal && backend && out);
    return guarded([&] { *out = dup(harness::complete_once(scene->scene, scene->task, subgoal, backend).dump(2)); });
}

} // extern "C"
