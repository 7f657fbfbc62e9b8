#include "mapper/semantic_map.hpp"

#include <algorithm>
#include <cstdlib>

namespace taskgrid::mapper {

SemanticMap::SemanticMap(int height, int width)
    : height_(height), width_(width),
      data_(kChannels * static_cast<std::size_t>(height) * static_cast<std::size_t>(width), 0.0) {}

std::vector<Cell> SemanticMap::cells_of(Category k) const {
    std::vector<Cell> out;
    for (int r = 0; r < height_; ++r)
        for (int c = 0; c < width_; ++c)
            if (has(k, {r, c})) out.push_back({r, c});
    return out;
}

void update(SemanticMap& map, const world::EgocentricObservation& obs) {
    map.agent_ = obs.pose;
    for (const auto& oc : obs.cells) {
        if (!map.in_bounds(oc.cell)) continue;
        map.set(SemanticMap::kExploredChannel, oc.cell, 1.0);
        map.set(SemanticMap::kObstacleChannel, oc.cell, oc.obstacle ? 1.0 : 0.0);
        for (std::size_t k = 0; k < SemanticMap::kCategoryChannels; ++k) map.set(k, oc.cell, 0.0);
    }
    for (const auto& inst : obs.instances) {
        if (map.in_bounds(inst.cell)) map.set(world::index(inst.category), inst.cell, 1.0);
    }
}

std::vector<Landmark> observed_landmarks(const SemanticMap& map) {
    std::vector<Landmark> out;
    const Cell a = map.agent().cell;
    for (std::size_t k = 0; k < SemanticMap::kCategoryChannels; ++k) {
        const auto cells = map.cells_of(world::category_at(k));
        if (cells.empty()) continue;
        const auto best = std::min_element(cells.begin(), cells.end(), [&](Cell x, Cell y) {
            const int dx = std::abs(x.row - a.row) + std::abs(x.col - a.col);
            const int dy = std::abs(y.row - a.row) + std::abs(y.col - a.col);
            return dx < dy;
        });
        out.push_back({world::category_at(k), *best});
    }
    std::sort(out.begin(), out.end(), [](const Landmark& x, const Landmark& y) {
        return world::name(x.category) < world::name(y.category);
    });
    return out;
}

std::vector<std::string> landmark_names(const std::vector<Landmark>& landmarks) {
    std::vector<std::string> out;
    for (const auto& l : landmarks) out.emplace_back(world::name(l.category));
    return out;
}

} // namespace taskgrid::mapper
