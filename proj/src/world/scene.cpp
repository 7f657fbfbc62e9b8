#include "world/scene.hpp"

#include <algorithm>
#include <array>
#include <sstream>

namespace taskgrid::world {

Cell step_toward(Cell c, Heading h) {
    switch (h) {
        case Heading::N: return {c.row - 1, c.col};
        case Heading::E: return {c.row, c.col + 1};
        case Heading::S: return {c.row + 1, c.col};
        case Heading::W: return {c.row, c.col - 1};
    }
    return c;
}

Heading rotate_left(Heading h) { return static_cast<Heading>((static_cast<int>(h) + 3) % 4); }
Heading rotate_right(Heading h) { return static_cast<Heading>((static_cast<int>(h) + 1) % 4); }

std::string_view heading_name(Heading h) {
    constexpr std::array<std::string_view, 4> names{"N", "E", "S", "W"};
    return names[static_cast<std::size_t>(h)];
}

std::optional<Heading> parse_heading(std::string_view text) {
    for (int i = 0; i < 4; ++i) {
        if (heading_name(static_cast<Heading>(i)) == text) return static_cast<Heading>(i);
    }
    return std::nullopt;
}

bool GridScene::walkable(Cell c) const {
    if (is_wall(c)) return false;
    return std::none_of(objects.begin(), objects.end(), [&](const ObjectInstance& o) {
        return info(o.category).furniture && o.cell == c;
    });
}

bool GridScene::sealed(ObjectId id) const {
    std::optional<ObjectId> parent = object(id).contained_in;
    while (parent) {
        const auto& p = object(*parent);
        if (info(p.category).openable && !p.open) return true;
        parent = p.contained_in;
    }
    return false;
}

std::vector<ObjectId> GridScene::closed_chain(ObjectId id) const {
    std::vector<ObjectId> chain;
    std::optional<ObjectId> parent = object(id).contained_in;
    while (parent) {
        const auto& p = object(*parent);
        if (info(p.category).openable && !p.open) chain.push_back(p.id);
        parent = p.contained_in;
    }
    std::reverse(chain.begin(), chain.end());
    return chain;
}

std::vector<ObjectId> GridScene::instances_of(Category c) const {
    std::vector<ObjectId> out;
    for (const auto& o : objects) {
        if (o.category == c) out.push_back(o.id);
    }
    return out;
}

std::vector<ObjectId> GridScene::objects_at(Cell c) const {
    std::vector<ObjectId> out;
    for (const auto& o : objects) {
        if (o.cell == c) out.push_back(o.id);
    }
    return out;
}

std::string_view task_type_name(TaskType t) {
    constexpr std::array<std::string_view, kTaskTypeCount> names{
        "Examine", "Pick & Place", "Stack & Place", "Clean & Place",
        "Cool & Place", "Heat & Place", "Pick 2 & Place"};
    return names[static_cast<std::size_t>(t)];
}

std::optional<TaskType> parse_task_type(std::string_view text) {
    for (std::size_t i = 0; i < kTaskTypeCount; ++i) {
        if (task_type_name(static_cast<TaskType>(i)) == text) return static_cast<TaskType>(i);
    }
    return std::nullopt;
}

std::string describe(const GoalCondition& c) {
    std::ostringstream os;
    switch (c.kind) {
        case ConditionKind::Placed: os << "Placed"; break;
        case ConditionKind::Held: os << "Held"; break;
        case ConditionKind::ToggledOn: os << "ToggledOn"; break;
        case ConditionKind::Cleaned: os << "Cleaned"; break;
        case ConditionKind::Heated: os << "Heated"; break;
        case ConditionKind::Cooled: os << "Cooled"; break;
        case ConditionKind::Sliced: os << "Sliced"; break;
    }
    os << '(' << name(c.object);
    if (c.receptacle) os << ", " << name(*c.receptacle);
    if (c.kind == ConditionKind::Placed && c.count != 1) os << ", count=" << c.count;
    if (c.containing) os << ", containing=" << name(*c.containing);
    if (c.need_clean) os << ", clean";
    if (c.need_hot) os << ", hot";
    if (c.need_cold) os << ", cold";
    os << ')';
    return os.str();
}

} // namespace taskgrid::world
