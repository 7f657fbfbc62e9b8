#include "world/serialize.hpp"

#include <array>

namespace taskgrid::world {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, 7> kConditionNames{
    "Placed", "Held", "ToggledOn", "Cleaned", "Heated", "Cooled", "Sliced"};

Category category_field(const json& j, const char* key) {
    const auto c = parse_category(j.at(key).get<std::string>());
    if (!c) throw FormatError(std::string("unknown category in '") + key + "'");
    return *c;
}

std::optional<Category> optional_category(const json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return category_field(j, key);
}

json cell_json(const std::optional<Cell>& c) {
    if (!c) return nullptr;
    return json::array({c->row, c->col});
}

std::optional<Cell> cell_from(const json& j) {
    if (j.is_null()) return std::nullopt;
    return Cell{j.at(0).get<int>(), j.at(1).get<int>()};
}

} // namespace

std::string_view condition_kind_name(ConditionKind k) { return kConditionNames[static_cast<std::size_t>(k)]; }

json task_to_json(const TaskSpec& t) {
    json conds = json::array();
    for (const auto& c : t.goal_conditions) {
        conds.push_back({{"kind", condition_kind_name(c.kind)},
                         {"object", name(c.object)},
                         {"receptacle", c.receptacle ? json(name(*c.receptacle)) : json(nullptr)},
                         {"count", c.count},
                         {"containing", c.containing ? json(name(*c.containing)) : json(nullptr)},
                         {"clean", c.need_clean},
                         {"hot", c.need_hot},
                         {"cold", c.need_cold}});
    }
    return {{"type", task_type_name(t.type)},
            {"goal_statement", t.goal_statement},
            {"steps", t.step_instructions},
            {"conditions", conds},
            {"goal_object", name(t.goal_object)}};
}

TaskSpec task_from_json(const json& j) {
    TaskSpec t;
    const auto type = parse_task_type(j.at("type").get<std::string>());
    if (!type) throw FormatError("unknown task type");
    t.type = *type;
    t.goal_statement = j.at("goal_statement").get<std::string>();
    t.step_instructions = j.at("steps").get<std::vector<std::string>>();
    t.goal_object = category_field(j, "goal_object");
    for (const auto& c : j.at("conditions")) {
        GoalCondition g;
        const auto kind = c.at("kind").get<std::string>();
        bool found = false;
        for (std::size_t i = 0; i < kConditionNames.size(); ++i) {
            if (kConditionNames[i] == kind) {
                g.kind = static_cast<ConditionKind>(i);
                found = true;
            }
        }
        if (!found) throw FormatError("unknown condition kind '" + kind + "'");
        g.object = category_field(c, "object");
        g.receptacle = optional_category(c, "receptacle");
        g.count = c.value("count", 1);
        g.containing = optional_category(c, "containing");
        g.need_clean = c.value("clean", false);
        g.need_hot = c.value("hot", false);
        g.need_cold = c.value("cold", false);
        t.goal_conditions.push_back(g);
    }
    if (t.goal_conditions.empty()) throw FormatError("task has no goal conditions");
    return t;
}

json scene_to_json(const GridScene& s, const TaskSpec& task) {
    json rows = json::array();
    for (int r = 0; r < s.height; ++r) {
        std::string row;
        for (int c = 0; c < s.width; ++c) row.push_back(s.is_wall({r, c}) ? '#' : '.');
        rows.push_back(row);
    }
    json objects = json::array();
    for (const auto& o : s.objects) {
        objects.push_back({{"id", o.id},
                           {"category", name(o.category)},
                           {"cell", cell_json(o.cell)},
                           {"open", o.open},
                           {"on", o.on},
                           {"sliced", o.sliced},
                           {"held", o.held},
                           {"clean", o.clean},
                           {"hot", o.hot},
                           {"cold", o.cold},
                           {"contained_in", o.contained_in ? json(*o.contained_in) : json(nullptr)}});
    }
    json t = task_to_json(task);
    t["hard"] = task.hard;
    return {{"v", kSceneFormatVersion},
            {"seed", s.seed},
            {"room_type", room_name(s.room_type)},
            {"hard", task.hard},
            {"layout_variant", s.layout_variant},
            {"grid", {{"width", s.width}, {"height", s.height}, {"rows", rows}}},
            {"spawn", {{"cell", cell_json(s.spawn.cell)}, {"heading", heading_name(s.spawn.heading)}}},
            {"objects", objects},
            {"task", t}};
}

std::pair<GridScene, TaskSpec> scene_from_json(const json& j) {
    if (j.value("v", 0) != kSceneFormatVersion) throw FormatError("unsupported scene format version");
    GridScene s;
    s.seed = j.at("seed").get<std::uint64_t>();
    const auto room = parse_room(j.at("room_type").get<std::string>());
    if (!room) throw FormatError("unknown room type");
    s.room_type = *room;
    s.layout_variant = j.value("layout_variant", 0);
    const auto& grid = j.at("grid");
    s.width = grid.at("width").get<int>();
    s.height = grid.at("height").get<int>();
    const auto rows = grid.at("rows").get<std::vector<std::string>>();
    if (static_cast<int>(rows.size()) != s.height) throw FormatError("grid row count mismatch");
    for (const auto& row : rows) {
        if (static_cast<int>(row.size()) != s.width) throw FormatError("grid row width mismatch");
        for (char ch : row) s.wall.push_back(ch == '#');
    }
    const auto spawn = cell_from(j.at("spawn").at("cell"));
    const auto heading = parse_heading(j.at("spawn").at("heading").get<std::string>());
    if (!spawn || !heading) throw FormatError("bad spawn");
    s.spawn = {*spawn, *heading, Look::Level};
    for (const auto& o : j.at("objects")) {
        ObjectInstance inst;
        inst.id = o.at("id").get<int>();
        inst.category = category_field(o, "category");
        inst.cell = cell_from(o.at("cell"));
        inst.open = o.value("open", false);
        inst.on = o.value("on", false);
        inst.sliced = o.value("sliced", false);
        inst.held = o.value("held", false);
        inst.clean = o.value("clean", false);
        inst.hot = o.value("hot", false);
        inst.cold = o.value("cold", false);
        if (!o.at("contained_in").is_null()) inst.contained_in = o.at("contained_in").get<int>();
        s.objects.push_back(inst);
    }
    TaskSpec t = task_from_json(j.at("task"));
    t.hard = j.value("hard", false);
    return {std::move(s), std::move(t)};
}

} // namespace taskgrid::world
