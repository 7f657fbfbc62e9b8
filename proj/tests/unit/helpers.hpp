#pragma once

#include "mapper/semantic_map.hpp"
#include "world/world.hpp"

#include <random>

namespace testing_helpers {

using taskgrid::mapper::SemanticMap;
using taskgrid::world::Category;
using taskgrid::world::Cell;

// Map whose cells in [r0,r1)x[c0,c1) are explored and free, agent at `agent`.
inline SemanticMap open_map(int h, int w, int r0, int r1, int c0, int c1, Cell agent = {0, 0}) {
    taskgrid::world::EgocentricObservation obs;
    obs.pose.cell = agent;
    for (int r = r0; r < r1; ++r)
        for (int c = c0; c < c1; ++c) obs.cells.push_back({{r, c}, false});
    SemanticMap m(h, w);
    taskgrid::mapper::update(m, obs);
    return m;
}

// Random explored-or-not map with scattered categories.
inline SemanticMap random_map(int h, int w, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    taskgrid::world::EgocentricObservation obs;
    obs.pose.cell = {static_cast<int>(rng() % h), static_cast<int>(rng() % w)};
    obs.pose.heading = static_cast<taskgrid::world::Heading>(rng() % 4);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            if (rng() % 4 == 0) continue;
            const bool wall = rng() % 6 == 0;
            obs.cells.push_back({{r, c}, wall});
            if (!wall && rng() % 3 == 0) {
                obs.instances.push_back({{r, c}, taskgrid::world::category_at(rng() % taskgrid::world::kCategoryCount)});
            }
        }
    SemanticMap m(h, w);
    taskgrid::mapper::update(m, obs);
    return m;
}

} // namespace testing_helpers
