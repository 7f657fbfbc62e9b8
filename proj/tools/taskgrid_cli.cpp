#include "taskgrid/taskgrid.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Failure {
    std::string message;
};

void check(tg_status s, const char* what) {
    if (s != TG_OK) throw Failure{std::string(what) + ": " + tg_last_error()};
}

std::string take(char* s) {
    std::string out = s ? s : "";
    tg_string_free(s);
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Failure{"cannot read " + path};
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Failure{"cannot write " + path.string()};
    out << text;
}

struct Globals {
    std::optional<std::uint64_t> seed;
    std::string config;
    std::string out = ".";
};

json load_config(const Globals& g) {
    json j = json::object();
    if (!g.config.empty()) {
        try {
            j = json::parse(read_file(g.config));
        } catch (const json::exception& e) {
            throw Failure{"config " + g.config + ": " + e.what()};
        }
    }
    if (g.seed) j["seed"] = *g.seed;
    return j;
}

fs::path out_dir(const Globals& g) {
    fs::create_directories(g.out);
    return g.out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Grid-world embodied instruction following: scenes, datasets, localizer training, evaluation"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--seed", g.seed, "Seed (overrides the config's seed)");
    app.add_option("--config", g.config, "JSON config file");
    app.add_option("--out", g.out, "Output directory; relative paths in configs resolve against it");

    auto* gen = app.add_subcommand("generate-scenes", "Write the scenes of an eval split as JSONL");
    std::string split;
    int episodes = 0;
    gen->add_option("--split", split, "train, valid_seen or valid_unseen");
    gen->add_option("--episodes", episodes, "Number of scenes");

    auto* collect = app.add_subcommand("collect-dataset", "Expert-replay localizer dataset from scenes");
    std::string scenes_path;
    int survey_budget = 300;
    collect->add_option("--scenes", scenes_path, "Scene JSONL (default: <out>/scenes.jsonl)");
    collect->add_option("--survey-budget", survey_budget, "Survey steps before the expert replay");

    auto* train = app.add_subcommand("train-localizer", "Train the object localizer");
    std::string dataset_path;
    bool no_graph = false;
    std::string roles = "prose";
    int decoder_hidden = 0;
    int epochs = 0;
    train->add_option("--dataset", dataset_path, "Dataset JSONL (default: <out>/dataset.jsonl)");
    train->add_flag("--no-graph", no_graph, "Disable the object correlation graph");
    train->add_option("--attention-roles", roles, "prose or eq2")->check(CLI::IsMember({"prose", "eq2"}));
    train->add_option("--decoder-hidden", decoder_hidden, "Hidden width of the decoder MLP (0: linear)");
    train->add_option("--epochs", epochs, "Override the number of epochs");

    auto* eval = app.add_subcommand("run-eval", "Run an evaluation and write results.json and metrics.json");
    int workers = 0;
    eval->add_option("--workers", workers, "Parallel episodes (overrides the config)");

    auto* report = app.add_subcommand("report", "Markdown tables from a results file");
    std::string results_path;
    report->add_option("--results", results_path, "results.json (default: <out>/results.json)");

    auto* complete = app.add_subcommand("complete", "Render one prompt, query the backend and parse the reply");
    std::string scene_file;
    std::string subgoal;
    std::string backend = "oracle";
    complete->add_option("--scene", scene_file, "Scene JSONL; the first record is used")->required();
    complete->add_option("--subgoal", subgoal, "e.g. \"Pickup Mug\"")->required();
    complete->add_option("--backend", backend, "oracle, http or scripted:<path>");
    bool verbose = false;
    complete->add_flag("--verbose", verbose, "Also print the prompt and raw response");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*gen) {
            json cfg = load_config(g);
            if (!split.empty()) cfg["split"] = split;
            if (episodes > 0) cfg["episodes"] = episodes;
            const fs::path path = out_dir(g) / "scenes.jsonl";
            int count = 0;
            check(tg_generate_scenes(cfg.dump().c_str(), path.string().c_str(), &count), "generate-scenes");
            std::cout << "wrote " << count << " scenes to " << path.string() << "\n";
        } else if (*collect) {
            const fs::path dir = out_dir(g);
            const std::string in = scenes_path.empty() ? (dir / "scenes.jsonl").string() : scenes_path;
            const fs::path path = dir / "dataset.jsonl";
            int records = 0;
            check(tg_collect_dataset(in.c_str(), survey_budget, path.string().c_str(), &records), "collect-dataset");
            std::cout << "wrote " << records << " samples to " << path.string() << "\n";
        } else if (*train) {
            const fs::path dir = out_dir(g);
            json cfg = load_config(g);
            json model_cfg = cfg.value("model", json::object());
            if (no_graph) model_cfg["use_graph"] = false;
            if (roles != "prose") model_cfg["roles"] = roles;
            if (decoder_hidden > 0) model_cfg["decoder_hidden"] = decoder_hidden;
            if (g.seed) model_cfg["seed"] = *g.seed;
            json train_cfg = cfg.value("train", json::object());
            if (g.seed) train_cfg["seed"] = *g.seed;
            if (epochs > 0) train_cfg["epochs"] = epochs;
            const std::string in = dataset_path.empty() ? (dir / "dataset.jsonl").string() : dataset_path;
            tg_localizer* model = nullptr;
            check(tg_localizer_create(model_cfg.dump().c_str(), &model), "train-localizer");
            char* summary = nullptr;
            const tg_status s = tg_localizer_train(model, in.c_str(), train_cfg.dump().c_str(),
                                                   (dir / "train_log.csv").string().c_str(), &summary);
            if (s == TG_OK) {
                const tg_status saved = tg_localizer_save(model, (dir / "checkpoint.json").string().c_str());
                tg_localizer_free(model);
                check(saved, "train-localizer");
            } else {
                tg_localizer_free(model);
                check(s, "train-localizer");
            }
            const std::string text = take(summary);
            write_file(dir / "train_summary.json", text + "\n");
            std::cout << text << "\n";
        } else if (*eval) {
            if (g.config.empty()) throw CLI::RequiredError("--config");
            const fs::path dir = out_dir(g);
            json cfg = load_config(g);
            if (workers > 0) cfg["workers"] = workers;
            char* results = nullptr;
            check(tg_run_eval(cfg.dump().c_str(), dir.string().c_str(), &results), "run-eval");
            const std::string text = take(results);
            const json doc = json::parse(text);
            write_file(dir / cfg.value("output", std::string("results.json")), text);
            write_file(dir / "metrics.json", doc.at("metrics").dump(2) + "\n");
            std::cout << doc.at("metrics").dump(2) << "\n";
        } else if (*report) {
            const fs::path dir = out_dir(g);
            const std::string in = results_path.empty() ? (dir / "results.json").string() : results_path;
            char* md = nullptr;
            check(tg_report(read_file(in).c_str(), &md), "report");
            const std::string text = take(md);
            write_file(dir / "report.md", text);
            std::cout << text;
        } else if (*complete) {
            std::istringstream lines(read_file(scene_file));
            std::string first;
            while (std::getline(lines, first) && first.find_first_not_of(" \t\r") == std::string::npos) {
            }
            tg_scene* scene = nullptr;
            check(tg_scene_from_json(first.c_str(), &scene), "complete");
            char* out = nullptr;
            const tg_status s = tg_complete(scene, subgoal.c_str(), backend.c_str(), &out);
            tg_scene_free(scene);
            check(s, "complete");
            const json doc = json::parse(take(out));
            if (verbose) {
                std::cout << doc.at("system").get<std::string>() << "\n\n" << doc.at("agent").get<std::string>()
                          << "\n\n" << doc.at("response").get<std::string>() << "\n\n";
            }
            for (const auto& s : doc.at("subgoals")) std::cout << s.get<std::string>() << "\n";
        }
    } catch (const CLI::Error& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const Failure& f) {
        std::cerr << "error: " << f.message << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
