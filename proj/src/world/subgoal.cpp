#include "world/subgoal.hpp"

#include <array>
#include <cctype>

namespace taskgrid::world {

namespace {

constexpr std::array<std::string_view, 8> kNames{
    "GotoLocation", "PickupObject", "PutObject", "OpenObject", "CloseObject",
    "ToggleObjectOn", "ToggleObjectOff", "SliceObject"};

constexpr std::array<std::string_view, 8> kVerbs{
    "go to", "pick up", "put", "open", "close", "turn on", "turn off", "slice"};

std::string squash(std::string_view text) {
    std::string out;
    for (char ch : text) {
        if (std::isalnum(static_cast<unsigned char>(ch))) {
            out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
        }
    }
    return out;
}

std::string lower_trim(std::string_view text) {
    std::string out;
    for (char ch : text) out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    while (!out.empty() && (out.back() == '.' || std::isspace(static_cast<unsigned char>(out.back())))) out.pop_back();
    std::size_t b = 0;
    while (b < out.size() && std::isspace(static_cast<unsigned char>(out[b]))) ++b;
    return out.substr(b);
}

bool takes_in(Category r) {
    const auto& ri = info(r);
    if (ri.openable || ri.pickupable) return true;
    return r == Category::SinkBasin || r == Category::GarbageCan || r == Category::Bathtub;
}

std::string article_words(Category c) { return "the " + category_words(c); }

} // namespace

std::string_view subgoal_action_name(SubgoalAction a) { return kNames[static_cast<std::size_t>(a)]; }

std::string_view subgoal_verb(SubgoalAction a) { return kVerbs[static_cast<std::size_t>(a)]; }

std::optional<SubgoalAction> parse_subgoal_action(std::string_view text) {
    const std::string key = squash(text);
    if (key.empty()) return std::nullopt;
    for (std::size_t i = 0; i < kNames.size(); ++i) {
        const std::string full = squash(kNames[i]);
        const std::string verb = squash(kVerbs[i]);
        std::string stem = full;
        for (std::string_view suffix : {"object", "location"}) {
            if (stem.size() > suffix.size() && stem.ends_with(suffix)) stem.resize(stem.size() - suffix.size());
        }
        if (key == full || key == verb || key == stem) return static_cast<SubgoalAction>(i);
    }
    if (key == "navigate" || key == "goto") return SubgoalAction::GotoLocation;
    if (key == "toggleon" || key == "switchon") return SubgoalAction::ToggleObjectOn;
    if (key == "toggleoff" || key == "switchoff") return SubgoalAction::ToggleObjectOff;
    if (key == "place") return SubgoalAction::PutObject;
    return std::nullopt;
}

std::optional<ActionKind> to_action_kind(SubgoalAction a) {
    switch (a) {
        case SubgoalAction::GotoLocation: return std::nullopt;
        case SubgoalAction::PickupObject: return ActionKind::PickupObject;
        case SubgoalAction::PutObject: return ActionKind::PutObject;
        case SubgoalAction::OpenObject: return ActionKind::OpenObject;
        case SubgoalAction::CloseObject: return ActionKind::CloseObject;
        case SubgoalAction::ToggleObjectOn: return ActionKind::ToggleObjectOn;
        case SubgoalAction::ToggleObjectOff: return ActionKind::ToggleObjectOff;
        case SubgoalAction::SliceObject: return ActionKind::SliceObject;
    }
    return std::nullopt;
}

std::string to_string(const Subgoal& s) {
    return std::string(subgoal_action_name(s.action)) + " " + std::string(name(s.object));
}

std::optional<Subgoal> parse_subgoal(std::string_view text) {
    // The object is the trailing token; the action is everything before it.
    std::string t(text);
    while (!t.empty() && std::isspace(static_cast<unsigned char>(t.back()))) t.pop_back();
    const auto split = t.find_last_of(" \t");
    if (split == std::string::npos) return std::nullopt;
    const auto action = parse_subgoal_action(std::string_view(t).substr(0, split));
    const auto object = parse_category(std::string_view(t).substr(split + 1));
    if (!action || !object) return std::nullopt;
    return Subgoal{*action, *object, std::nullopt, -1};
}

namespace sentence {
std::string pick_up(Category x, bool another) {
    return std::string("Pick up ") + (another ? "another " : "the ") + category_words(x) + ".";
}
std::string put(Category r) { return std::string("Put it ") + (takes_in(r) ? "in " : "on ") + article_words(r) + "."; }
std::string turn_on(Category lamp) { return "Turn on " + article_words(lamp) + "."; }
std::string rinse(Category sink) { return "Rinse it in " + article_words(sink) + "."; }
std::string heat(Category device) { return "Heat it in " + article_words(device) + "."; }
std::string chill(Category device) { return "Chill it in " + article_words(device) + "."; }
std::string slice(Category x) { return "Slice " + article_words(x) + "."; }
} // namespace sentence

std::vector<Subgoal> parse_instructions(const std::vector<std::string>& steps) {
    std::vector<Subgoal> out;
    std::optional<Category> carried;
    for (std::size_t i = 0; i < steps.size(); ++i) {
        const std::string s = lower_trim(steps[i]);
        const int idx = static_cast<int>(i);
        auto after = [&](std::string_view prefix) -> std::optional<Category> {
            if (!s.starts_with(prefix)) return std::nullopt;
            return parse_category(std::string_view(s).substr(prefix.size()));
        };
        auto add = [&](SubgoalAction a, Category c) { out.push_back({a, c, std::nullopt, idx}); };

        if (auto c = after("pick up another "); c) {
            add(SubgoalAction::PickupObject, *c);
            carried = c;
        } else if (auto c2 = after("pick up the "); c2) {
            add(SubgoalAction::PickupObject, *c2);
            carried = c2;
        } else if (auto c3 = after("put it in the "); c3) {
            add(SubgoalAction::PutObject, *c3);
        } else if (auto c4 = after("put it on the "); c4) {
            add(SubgoalAction::PutObject, *c4);
        } else if (auto c5 = after("turn on the "); c5) {
            add(SubgoalAction::ToggleObjectOn, *c5);
        } else if (auto c6 = after("turn off the "); c6) {
            add(SubgoalAction::ToggleObjectOff, *c6);
        } else if (auto c7 = after("slice the "); c7) {
            add(SubgoalAction::SliceObject, *c7);
        } else {
            std::optional<Category> device;
            for (std::string_view p : {"rinse it in the ", "heat it in the ", "chill it in the "}) {
                if (auto d = after(p); d) device = d;
            }
            if (device && carried) {
                add(SubgoalAction::PutObject, *device);
                add(SubgoalAction::ToggleObjectOn, *device);
                add(SubgoalAction::ToggleObjectOff, *device);
                add(SubgoalAction::PickupObject, *carried);
            }
        }
    }
    return out;
}

} // namespace taskgrid::world
