#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace taskgrid::world {

enum class Category : std::uint8_t {
    // fixed furniture
    Fridge, Cabinet, Drawer, Microwave, Safe,
    CounterTop, DiningTable, SinkBasin, StoveBurner, CoffeeMachine, GarbageCan,
    Shelf, Desk, Bed, SideTable, Dresser, Sofa, ArmChair, TVStand, Toilet, Bathtub,
    FloorLamp,
    // small objects
    DeskLamp,
    Mug, Bowl, Plate, Pan, Pot,
    Apple, Tomato, Potato, Lettuce, Bread,
    Knife, Spoon, Spatula,
    SoapBar, Cloth, Towel, ToiletPaper, SprayBottle,
    KeyChain, CreditCard, Pencil, Book, CellPhone, RemoteControl,
};

inline constexpr std::size_t kCategoryCount = static_cast<std::size_t>(Category::RemoteControl) + 1;

struct CategoryInfo {
    std::string_view name;
    bool furniture;   // occupies its own non-walkable cell
    bool openable;
    bool toggleable;
    bool sliceable;
    bool pickupable;
    bool receptacle;
};

const CategoryInfo& info(Category c);
inline std::string_view name(Category c) { return info(c).name; }
inline std::size_t index(Category c) { return static_cast<std::size_t>(c); }
inline Category category_at(std::size_t i) { return static_cast<Category>(i); }

// Accepts "CounterTop", "countertop" or "counter top".
std::optional<Category> parse_category(std::string_view text);
// Lower-case words, e.g. CounterTop -> "counter top".
std::string category_words(Category c);

enum class RoomType : std::uint8_t { Kitchen, Bathroom, Bedroom, LivingRoom };
inline constexpr std::array<RoomType, 4> kRoomTypes{RoomType::Kitchen, RoomType::Bathroom,
                                                    RoomType::Bedroom, RoomType::LivingRoom};

std::string_view room_name(RoomType r);
std::optional<RoomType> parse_room(std::string_view text);

// Every category that may appear in a room of this type, in catalog order.
std::span<const Category> possible_landmarks(RoomType r);

} // namespace taskgrid::world
