#include <doctest.h>

#include "harness/collect.hpp"
#include "harness/eval.hpp"
#include "harness/metrics.hpp"
#include "harness/training.hpp"
#include "taskgrid/taskgrid.h"
#include "world/expert.hpp"
#include "world/generator.hpp"

#include <filesystem>
#include <set>

using namespace taskgrid;
using namespace taskgrid::harness;
using agent::EpisodeResult;
using agent::ErrorMode;

namespace {

EpisodeResult result(const std::string& type, bool success, int sat, int total, int steps, int expert,
                     ErrorMode mode = ErrorMode::None) {
    EpisodeResult r;
    r.task_type = type;
    r.success = success;
    r.satisfied = sat;
    r.total = total;
    r.steps = steps;
    r.expert_length = expert;
    r.error_mode = mode;
    return r;
}

EvalConfig small_eval(int episodes) {
    EvalConfig c;
    c.episodes = episodes;
    c.hard_fraction = 0.5;
    c.use_localizer = false;
    return c;
}

} // namespace

TEST_CASE("path-length weighting") {
    CHECK(plw_factor(40, 40) == 1.0);
    CHECK(plw_factor(80, 40) == 0.5);
    CHECK(plw_factor(20, 40) == 1.0);
    CHECK(plw_factor(0, 0) == 0.0);
    const auto s = score({result("pick_and_place", true, 1, 1, 40, 40)});
    CHECK(s.plwsr == 1.0);
    CHECK(score({result("pick_and_place", true, 1, 1, 80, 40)}).plwsr == 0.5);
}

TEST_CASE("metric arithmetic on hand-built results") {
    const std::vector<EpisodeResult> rs = {
        result("a", true, 2, 2, 10, 10),
        result("a", false, 1, 2, 30, 10, ErrorMode::InteractionFailure),
        result("b", false, 0, 4, 50, 25, ErrorMode::GoalObjectNotFound),
        result("b", true, 4, 4, 100, 25),
    };
    const auto m = compute_metrics(rs);
    CHECK(m.overall.episodes == 4);
    CHECK(m.overall.sr == 0.5);
    CHECK(m.overall.gc == 7.0 / 12.0);
    CHECK(m.overall.plwsr == (1.0 + 0.25) / 4.0);
    CHECK(m.overall.plwgc == (1.0 + (1.0 / 3.0) * 0.5 + 0.25) / 4.0);
    CHECK(m.by_task_type.at("a").sr == 0.5);
    CHECK(m.by_task_type.at("b").gc == 0.5);
    CHECK(m.error_modes.at("none") == 2);
    CHECK(m.error_modes.at("navigation_failure") == 0);
    CHECK(m.error_modes.at("goal_object_not_found") == 1);
    CHECK_THROWS_AS(compute_metrics({}), MetricsError);
}

TEST_CASE("config validation") {
    CHECK_NOTHROW(EvalConfig{}.validate());
    auto bad = [](auto mutate) {
        EvalConfig c;
        mutate(c);
        CHECK_THROWS_AS(c.validate(), ConfigError);
    };
    bad([](EvalConfig& c) { c.split = "test_unseen"; });
    bad([](EvalConfig& c) { c.episodes = 0; });
    bad([](EvalConfig& c) { c.hard_fraction = 1.5; });
    bad([](EvalConfig& c) { c.tau = -0.1; });
    bad([](EvalConfig& c) { c.workers = 0; });
    bad([](EvalConfig& c) { c.valid_seen = {50000, 150000}; });
    CHECK_THROWS_AS(EvalConfig::from_json({{"episodes", "many"}}), ConfigError);

    EvalConfig noc = small_eval(2);
    noc.use_localizer = true;
    CHECK_THROWS_AS(run_eval(noc), ConfigError);

    EvalConfig w = small_eval(2);
    const std::string h = w.hash();
    w.workers = 4;
    w.output = "elsewhere.json";
    CHECK(w.hash() == h);
    w.tau = 0.3;
    CHECK(w.hash() != h);
    CHECK(EvalConfig::from_json(w.to_json()).hash() == w.hash());
}

TEST_CASE("splits are disjoint and layouts partitioned") {
    std::map<std::string, std::set<std::uint64_t>> seeds;
    for (const char* split : {"train", "valid_seen", "valid_unseen"}) {
        EvalConfig c = small_eval(60);
        c.split = split;
        const auto specs = episode_specs(c);
        CHECK(specs.size() == 60);
        int hard = 0;
        for (const auto& s : specs) {
            seeds[split].insert(s.seed);
            hard += s.hard;
            const int v = world::layout_variant_for_seed(s.seed);
            const bool unseen_layout = v == 4 || v == 5;
            CHECK(unseen_layout == (std::string(split) == "valid_unseen"));
        }
        CHECK(hard == 30);
    }
    for (auto a = seeds.begin(); a != seeds.end(); ++a)
        for (auto b = std::next(a); b != seeds.end(); ++b)
            for (auto s : a->second) CHECK(b->second.count(s) == 0);
}

TEST_CASE("dataset collection") {
    EvalConfig c = small_eval(6);
    c.split = "train";
    const auto scenes = generate_scenes(c);
    const auto data = collect_dataset(scenes, 300);
    std::size_t expected = 0;
    for (const auto& [scene, task] : scenes) expected += world::expert_plan(surveyed_scene(scene, 300), task).subgoals.size();
    CHECK(data.size() == expected);
    for (const auto& s : data) {
        CHECK(!s.gt_cells.empty());
        CHECK(localizer::gt_mask(s).size() == 24u * 24u);
        double total = 0.0;
        for (double v : localizer::gt_mask(s)) total += v;
        CHECK(total > 0.0);
        CHECK(s.text.find(std::string(world::subgoal_verb(s.subgoal.action))) == 0);
    }
    std::vector<localizer::TrainSample> tr, ho;
    split_by_scene(data, 0.34, tr, ho);
    CHECK(tr.size() + ho.size() == data.size());
    for (const auto& a : ho)
        for (const auto& b : tr) CHECK_FALSE((a.scene_seed == b.scene_seed && a.room == b.room));
}

TEST_CASE("evaluation is deterministic and parallel equals serial") {
    EvalConfig c = small_eval(8);
    const auto serial = run_eval(c);
    const auto again = run_eval(c);
    c.workers = 3;
    const auto parallel = run_eval(c);
    CHECK(serial.document.dump() == again.document.dump());
    CHECK(serial.document.dump() == parallel.document.dump());
    CHECK(serial.document.at("config_hash").get<std::string>().size() == 64);
    const std::string md = render_report(serial.document);
    CHECK(md.find("## Overall") != std::string::npos);
}

TEST_CASE("C API") {
    CHECK(std::string(tg_version()).size() > 0);
    tg_scene* scene = nullptr;
    REQUIRE(tg_scene_generate(7, "Kitchen", 1, &scene) == TG_OK);
    int length = 0;
    CHECK(tg_scene_expert_length(scene, &length) == TG_OK);
    CHECK(length > 0);
    char* json = nullptr;
    REQUIRE(tg_scene_to_json(scene, &json) == TG_OK);
    tg_scene* back = nullptr;
    CHECK(tg_scene_from_json(json, &back) == TG_OK);
    tg_string_free(json);
    tg_scene_free(back);

    char* out = nullptr;
    CHECK(tg_complete(scene, "Pickup Mug", "oracle", &out) == TG_OK);
    tg_string_free(out);
    out = nullptr;
    CHECK(tg_complete(scene, "Pickup", "oracle", &out) == TG_ERR_ARGUMENT);
    CHECK(std::string(tg_last_error()).size() > 0);
    tg_scene_free(scene);

    CHECK(tg_scene_generate(1, "Garage", 0, &scene) == TG_ERR_ARGUMENT);
    CHECK(tg_scene_from_json("{not json", &scene) == TG_ERR_FORMAT);
    CHECK(tg_run_eval("{\"split\":\"nowhere\"}", ".", &out) == TG_ERR_CONFIG);
    CHECK(tg_report("{}", &out) != TG_OK);

    tg_localizer* model = nullptr;
    CHECK(tg_localizer_load("/nonexistent/ckpt.json", &model) == TG_ERR_IO);
    REQUIRE(tg_localizer_create("{\"d\":8,\"conv_channels\":4}", &model) == TG_OK);
    const auto path = (std::filesystem::temp_directory_path() / "tg_capi_ckpt.json").string();
    CHECK(tg_localizer_save(model, path.c_str()) == TG_OK);
    tg_localizer_free(model);
    CHECK(tg_localizer_load(path.c_str(), &model) == TG_OK);
    tg_localizer_free(model);
}
