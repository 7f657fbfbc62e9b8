#include "world/catalog.hpp"

#include <algorithm>
#include <cctype>
#include <vector>

namespace taskgrid::world {

namespace {

//                                  furn   open   toggle slice  pickup recep
constexpr std::array<CategoryInfo, kCategoryCount> kInfo{{
    {"Fridge",        true,  true,  true,  false, false, true},
    {"Cabinet",       true,  true,  false, false, false, true},
    {"Drawer",        true,  true,  false, false, false, true},
    {"Microwave",     true,  true,  true,  false, false, true},
    {"Safe",          true,  true,  false, false, false, true},
    {"CounterTop",    true,  false, false, false, false, true},
    {"DiningTable",   true,  false, false, false, false, true},
    {"SinkBasin",     true,  false, true,  false, false, true},
    {"StoveBurner",   true,  false, true,  false, false, true},
    {"CoffeeMachine", true,  false, true,  false, false, true},
    {"GarbageCan",    true,  false, false, false, false, true},
    {"Shelf",         true,  false, false, false, false, true},
    {"Desk",          true,  false, false, false, false, true},
    {"Bed",           true,  false, false, false, false, true},
    {"SideTable",     true,  false, false, false, false, true},
    {"Dresser",       true,  false, false, false, false, true},
    {"Sofa",          true,  false, false, false, false, true},
    {"ArmChair",      true,  false, false, false, false, true},
    {"TVStand",       true,  false, false, false, false, true},
    {"Toilet",        true,  false, false, false, false, true},
    {"Bathtub",       true,  false, false, false, false, true},
    {"FloorLamp",     true,  false, true,  false, false, false},
    {"DeskLamp",      false, false, true,  false, false, false},
    {"Mug",           false, false, false, false, true,  true},
    {"Bowl",          false, false, false, false, true,  true},
    {"Plate",         false, false, false, false, true,  true},
    {"Pan",           false, false, false, false, true,  true},
    {"Pot",           false, false, false, false, true,  true},
    {"Apple",         false, false, false, true,  true,  false},
    {"Tomato",        false, false, false, true,  true,  false},
    {"Potato",        false, false, false, true,  true,  false},
    {"Lettuce",       false, false, false, true,  true,  false},
    {"Bread",         false, false, false, true,  true,  false},
    {"Knife",         false, false, false, false, true,  false},
    {"Spoon",         false, false, false, false, true,  false},
    {"Spatula",       false, false, false, false, true,  false},
    {"SoapBar",       false, false, false, false, true,  false},
    {"Cloth",         false, false, false, false, true,  false},
    {"Towel",         false, false, false, false, true,  false},
    {"ToiletPaper",   false, false, false, false, true,  false},
    {"SprayBottle",   false, false, false, false, true,  false},
    {"KeyChain",      false, false, false, false, true,  false},
    {"CreditCard",    false, false, false, false, true,  false},
    {"Pencil",        false, false, false, false, true,  false},
    {"Book",          false, false, false, false, true,  false},
    {"CellPhone",     false, false, false, false, true,  false},
    {"RemoteControl", false, false, false, false, true,  false},
}};

using C = Category;

const std::vector<Category> kKitchen{
    C::Fridge, C::Cabinet, C::Drawer, C::Microwave, C::CounterTop, C::DiningTable,
    C::SinkBasin, C::StoveBurner, C::CoffeeMachine, C::GarbageCan, C::Shelf,
    C::Mug, C::Bowl, C::Plate, C::Pan, C::Pot, C::Apple, C::Tomato, C::Potato,
    C::Lettuce, C::Bread, C::Knife, C::Spoon, C::Spatula, C::SprayBottle,
};
const std::vector<Category> kBathroom{
    C::Cabinet, C::Drawer, C::CounterTop, C::SinkBasin, C::GarbageCan, C::Shelf,
    C::Toilet, C::Bathtub, C::SoapBar, C::Cloth, C::Towel, C::ToiletPaper, C::SprayBottle,
};
const std::vector<Category> kBedroom{
    C::Drawer, C::Safe, C::GarbageCan, C::Shelf, C::Desk, C::Bed, C::SideTable,
    C::Dresser, C::FloorLamp, C::DeskLamp, C::Mug, C::KeyChain, C::CreditCard,
    C::Pencil, C::Book, C::CellPhone,
};
const std::vector<Category> kLivingRoom{
    C::Cabinet, C::Drawer, C::Safe, C::DiningTable, C::GarbageCan, C::Shelf,
    C::SideTable, C::Sofa, C::ArmChair, C::TVStand, C::FloorLamp, C::Bowl, C::Plate,
    C::KeyChain, C::CreditCard, C::Book, C::CellPhone, C::RemoteControl,
};

std::string squash(std::string_view text) {
    std::string out;
    for (char ch : text) {
        if (std::isalnum(static_cast<unsigned char>(ch))) {
            out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
        }
    }
    return out;
}

} // namespace

const CategoryInfo& info(Category c) { return kInfo[index(c)]; }

std::optional<Category> parse_category(std::string_view text) {
    const std::string key = squash(text);
    if (key.empty()) return std::nullopt;
    for (std::size_t i = 0; i < kCategoryCount; ++i) {
        if (squash(kInfo[i].name) == key) return category_at(i);
    }
    return std::nullopt;
}

std::string category_words(Category c) {
    const std::string_view n = name(c);
    auto upper = [&](std::size_t i) { return std::isupper(static_cast<unsigned char>(n[i])) != 0; };
    std::string out;
    for (std::size_t i = 0; i < n.size(); ++i) {
        // word boundary: aB, or the last capital of an acronym (TVStand -> tv stand)
        if (i > 0 && upper(i) && (!upper(i - 1) || (i + 1 < n.size() && !upper(i + 1)))) {
            out.push_back(' ');
        }
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(n[i]))));
    }
    return out;
}

std::string_view room_name(RoomType r) {
    switch (r) {
        case RoomType::Kitchen: return "kitchen";
        case RoomType::Bathroom: return "bathroom";
        case RoomType::Bedroom: return "bedroom";
        case RoomType::LivingRoom: return "livingroom";
    }
    return "unknown";
}

std::optional<RoomType> parse_room(std::string_view text) {
    const std::string key = squash(text);
    for (RoomType r : kRoomTypes) {
        if (squash(room_name(r)) == key) return r;
    }
    return std::nullopt;
}

std::span<const Category> possible_landmarks(RoomType r) {
    switch (r) {
        case RoomType::Kitchen: return kKitchen;
        case RoomType::Bathroom: return kBathroom;
        case RoomType::Bedroom: return kBedroom;
        case RoomType::LivingRoom: return kLivingRoom;
    }
    return {};
}

} // namespace taskgrid::world
