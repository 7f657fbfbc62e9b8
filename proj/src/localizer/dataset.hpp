#pragma once

#include "mapper/semantic_map.hpp"
#include "world/subgoal.hpp"

#include <nlohmann/json.hpp>
#include <string>
#include <vector>

namespace taskgrid::localizer {

inline constexpr int kDatasetFormatVersion = 1;

struct TrainSample {
    mapper::SemanticMap map;   // snapshot at subgoal start
    std::string text;          // localizer input text
    world::Subgoal subgoal;
    std::vector<world::Cell> gt_cells;
    std::uint64_t scene_seed = 0;
    world::RoomType room = world::RoomType::Kitchen;
    bool hard = false;

    bool operator==(const TrainSample&) const = default;
};

// Only channels with a nonzero cell are written, each as a flat row-major
// array keyed by category name, "obstacle" or "explored".
nlohmann::json sample_to_json(const TrainSample& s);
TrainSample sample_from_json(const nlohmann::json& j);

void write_dataset(const std::string& path, const std::vector<TrainSample>& samples);
std::vector<TrainSample> read_dataset(const std::string& path);

// Row-major mask of the gt cells.
std::vector<double> gt_mask(const TrainSample& s);

} // namespace taskgrid::localizer
