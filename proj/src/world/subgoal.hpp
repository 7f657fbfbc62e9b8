#pragma once

#include "world/scene.hpp"
#include "world/world.hpp"

#include <optional>
#include <string>
#include <vector>

namespace taskgrid::world {

enum class SubgoalAction : std::uint8_t {
    GotoLocation, PickupObject, PutObject, OpenObject, CloseObject,
    ToggleObjectOn, ToggleObjectOff, SliceObject,
};

std::string_view subgoal_action_name(SubgoalAction a);
// Tolerant: "PickupObject", "pickup", "Pick up", "goto", "GotoLocation"...
std::optional<SubgoalAction> parse_subgoal_action(std::string_view text);
std::optional<ActionKind> to_action_kind(SubgoalAction a);
// Lower-case verb phrase used in instruction text ("pick up", "turn on").
std::string_view subgoal_verb(SubgoalAction a);

// One high-level plan step: action, object category and (optionally) the
// cell where it should happen.
struct Subgoal {
    SubgoalAction action = SubgoalAction::PickupObject;
    Category object = Category::Mug;
    std::optional<Cell> position;
    // Index of the step instruction this subgoal serves; -1 if none.
    int instruction = -1;

    // Identity is (action, object); position and provenance are hints.
    bool same_step(const Subgoal& o) const { return action == o.action && object == o.object; }
    bool operator==(const Subgoal&) const = default;
};

std::string to_string(const Subgoal& s);   // "PickupObject Mug"
// Parses "Pickup Mug", "PickupObject Mug", "GotoLocation CounterTop"...
std::optional<Subgoal> parse_subgoal(std::string_view text);

// Template-based translation of the generator's step instructions into the
// initial (sparse) subgoal list.
std::vector<Subgoal> parse_instructions(const std::vector<std::string>& steps);

// Sentence builders shared by the generator and the parser.
namespace sentence {
std::string pick_up(Category x, bool another = false);
std::string put(Category r);
std::string turn_on(Category lamp);
std::string rinse(Category sink);
std::string heat(Category device);
std::string chill(Category device);
std::string slice(Category x);
} // namespace sentence

} // namespace taskgrid::world
