#include <doctest.h>

#include "helpers.hpp"
#include "mapper/semantic_map.hpp"
#include "world/expert.hpp"
#include "world/generator.hpp"

using namespace taskgrid;
using namespace taskgrid::mapper;
using world::Category;
using world::Cell;

namespace {

world::EgocentricObservation seen(std::vector<Cell> cells, std::vector<world::ObservedInstance> inst = {}) {
    world::EgocentricObservation o;
    for (Cell c : cells) o.cells.push_back({c, false});
    o.instances = std::move(inst);
    return o;
}

} // namespace

TEST_CASE("update marks cells and instances") {
    SemanticMap m(8, 8);
    const SemanticMap fresh = m;
    update(m, world::EgocentricObservation{});
    CHECK(m.data() == fresh.data());

    update(m, seen({{4, 5}, {4, 6}}, {{{4, 5}, Category::Mug}}));
    CHECK(m.at(world::index(Category::Mug), {4, 5}) == 1.0);
    CHECK(m.explored({4, 6}));
    CHECK_FALSE(m.explored({0, 0}));
    CHECK(m.cells_of(Category::Mug) == std::vector<Cell>{{4, 5}});

    const SemanticMap once = m;
    update(m, seen({{4, 5}, {4, 6}}, {{{4, 5}, Category::Mug}}));
    CHECK(m == once);

    // the mug is gone on the next look
    update(m, seen({{4, 5}}));
    CHECK(m.at(world::index(Category::Mug), {4, 5}) == 0.0);
}

TEST_CASE("non-overlapping observations commute") {
    const auto a = seen({{1, 1}, {1, 2}}, {{{1, 2}, Category::Apple}});
    const auto b = seen({{5, 5}, {6, 5}}, {{{6, 5}, Category::Bowl}});
    SemanticMap ab(8, 8), ba(8, 8);
    update(ab, a);
    update(ab, b);
    update(ba, b);
    update(ba, a);
    CHECK(ab.data() == ba.data());
}

TEST_CASE("observed landmarks") {
    SemanticMap m(8, 8);
    CHECK(observed_landmarks(m).empty());
    update(m, seen({{1, 1}, {2, 2}}, {{{1, 1}, Category::StoveBurner}, {{2, 2}, Category::CounterTop}}));
    CHECK(landmark_names(observed_landmarks(m)) == std::vector<std::string>{"CounterTop", "StoveBurner"});

    SemanticMap cab(8, 8);
    auto obs = seen({{0, 0}, {0, 7}, {3, 3}}, {{{0, 0}, Category::Cabinet}, {{0, 7}, Category::Cabinet}});
    obs.pose.cell = {1, 6};
    update(cab, obs);
    const auto lm = observed_landmarks(cab);
    REQUIRE(lm.size() == 1);
    CHECK(lm[0] == Landmark{Category::Cabinet, {0, 7}});
}

TEST_CASE("opening a receptacle revises the map") {
    const auto [scene, task] = world::generate_scene(8, world::RoomType::Kitchen, true);
    const auto plan = world::expert_plan(scene, task);
    world::WorldState s = world::WorldState::start(scene);
    SemanticMap m(scene.height, scene.width);
    update(m, world::observe(s));
    bool revealed = false;
    for (const auto& a : plan.trajectory) {
        const bool before = !m.cells_of(task.goal_object).empty();
        world::step(s, a);
        update(m, world::observe(s));
        if (a.kind == world::ActionKind::OpenObject && !before && !m.cells_of(task.goal_object).empty()) revealed = true;
    }
    CHECK(revealed);
}

TEST_CASE("replayed expert maps agree with ground truth") {
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
        const auto [scene, task] = world::generate_scene(seed, world::kRoomTypes[seed % 4], seed % 2 == 0);
        const auto plan = world::expert_plan(scene, task);
        world::WorldState s = world::WorldState::start(scene);
        SemanticMap m(scene.height, scene.width);
        update(m, world::observe(s));
        for (const auto& a : plan.trajectory) {
            world::step(s, a);
            update(m, world::observe(s));
        }
        const auto obs = world::observe(s);
        for (int r = 0; r < scene.height; ++r)
            for (int c = 0; c < scene.width; ++c) {
                const Cell cell{r, c};
                if (!m.explored(cell)) continue;
                // last look at this cell may predate later moves, so compare only what is in view now
                bool in_view = false;
                for (const auto& oc : obs.cells) in_view = in_view || oc.cell == cell;
                if (!in_view) continue;
                for (std::size_t k = 0; k < world::kCategoryCount; ++k) {
                    bool truth = false;
                    for (world::ObjectId id : s.scene.objects_at(cell)) {
                        const auto& o = s.scene.object(id);
                        truth = truth || (world::index(o.category) == k && !o.held && !s.scene.sealed(id));
                    }
                    CHECK(m.at(k, cell) == (truth ? 1.0 : 0.0));
                }
            }
        // static furniture never moves, so every explored furniture cell is exact
        for (const auto& o : s.scene.objects) {
            if (!world::info(o.category).furniture || !o.cell || !m.explored(*o.cell)) continue;
            CHECK(m.has(o.category, *o.cell));
        }
    }
}
