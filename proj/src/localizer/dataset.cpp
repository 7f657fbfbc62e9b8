#include "localizer/dataset.hpp"

#include "world/serialize.hpp"

#include <fstream>

namespace taskgrid::localizer {

using nlohmann::json;
using mapper::SemanticMap;

namespace {

std::string channel_name(std::size_t k) {
    if (k == SemanticMap::kObstacleChannel) return "obstacle";
    if (k == SemanticMap::kExploredChannel) return "explored";
    return std::string(world::name(world::category_at(k)));
}

std::size_t channel_index(const std::string& name) {
    if (name == "obstacle") return SemanticMap::kObstacleChannel;
    if (name == "explored") return SemanticMap::kExploredChannel;
    const auto c = world::parse_category(name);
    if (!c) throw world::FormatError("unknown map channel '" + name + "'");
    return world::index(*c);
}

} // namespace

json sample_to_json(const TrainSample& s) {
    const std::size_t n = static_cast<std::size_t>(s.map.height() * s.map.width());
    json channels = json::object();
    for (std::size_t k = 0; k < SemanticMap::kChannels; ++k) {
        const auto begin = s.map.data().begin() + static_cast<std::ptrdiff_t>(k * n);
        std::vector<double> values(begin, begin + static_cast<std::ptrdiff_t>(n));
        bool any = false;
        for (double v : values) any = any || v != 0.0;
        if (any) channels[channel_name(k)] = values;
    }
    json cells = json::array();
    for (const auto& c : s.gt_cells) cells.push_back({c.row, c.col});
    const auto& pose = s.map.agent();
    return {{"v", kDatasetFormatVersion},
            {"seed", s.scene_seed},
            {"room_type", world::room_name(s.room)},
            {"hard", s.hard},
            {"subgoal", world::to_string(s.subgoal)},
            {"instruction", s.subgoal.instruction},
            {"text", s.text},
            {"gt_cells", cells},
            {"map", {{"height", s.map.height()},
                     {"width", s.map.width()},
                     {"agent", {{"cell", {pose.cell.row, pose.cell.col}}, {"heading", world::heading_name(pose.heading)}}},
                     {"channels", channels}}}};
}

TrainSample sample_from_json(const json& j) {
    if (j.value("v", 0) != kDatasetFormatVersion) throw world::FormatError("unsupported dataset version");
    TrainSample s;
    s.scene_seed = j.at("seed").get<std::uint64_t>();
    const auto room = world::parse_room(j.at("room_type").get<std::string>());
    if (!room) throw world::FormatError("unknown room type");
    s.room = *room;
    s.hard = j.value("hard", false);
    const auto sg = world::parse_subgoal(j.at("subgoal").get<std::string>());
    if (!sg) throw world::FormatError("bad subgoal");
    s.subgoal = *sg;
    s.subgoal.instruction = j.value("instruction", -1);
    s.text = j.at("text").get<std::string>();
    for (const auto& c : j.at("gt_cells")) s.gt_cells.push_back({c.at(0).get<int>(), c.at(1).get<int>()});
    if (!s.gt_cells.empty()) s.subgoal.position = s.gt_cells.front();
    const auto& m = j.at("map");
    s.map = SemanticMap(m.at("height").get<int>(), m.at("width").get<int>());
    const std::size_t n = static_cast<std::size_t>(s.map.height() * s.map.width());
    for (const auto& [name, values] : m.at("channels").items()) {
        const auto vec = values.get<std::vector<double>>();
        if (vec.size() != n) throw world::FormatError("map channel size mismatch");
        std::copy(vec.begin(), vec.end(), s.map.mutable_data().begin() + static_cast<std::ptrdiff_t>(channel_index(name) * n));
    }
    world::EgocentricObservation pose_only;
    pose_only.pose.cell = {m.at("agent").at("cell").at(0).get<int>(), m.at("agent").at("cell").at(1).get<int>()};
    const auto heading = world::parse_heading(m.at("agent").at("heading").get<std::string>());
    if (!heading) throw world::FormatError("bad heading");
    pose_only.pose.heading = *heading;
    mapper::update(s.map, pose_only);
    return s;
}

void write_dataset(const std::string& path, const std::vector<TrainSample>& samples) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    for (const auto& s : samples) out << sample_to_json(s).dump() << "\n";
}

std::vector<TrainSample> read_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::vector<TrainSample> out;
    for (std::string line; std::getline(in, line);) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        out.push_back(sample_from_json(json::parse(line)));
    }
    return out;
}

std::vector<double> gt_mask(const TrainSample& s) {
    std::vector<double> m(static_cast<std::size_t>(s.map.height() * s.map.width()), 0.0);
    for (const auto& c : s.gt_cells) m[static_cast<std::size_t>(c.row * s.map.width() + c.col)] = 1.0;
    return m;
}

} // namespace taskgrid::localizer
