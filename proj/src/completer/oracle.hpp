#pragma once

#include "completer/parser.hpp"
#include "world/world.hpp"

#include <stdexcept>
#include <vector>

namespace taskgrid::completer {

class CompleterError : public std::runtime_error {
public:
    enum class Kind { TargetAbsent, Transport, FixtureExhausted, Config };
    CompleterError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

// Answers from scene truth: walks the containment chain of the chosen
// instance and emits GotoLocation/Open for each closed receptacle, then the
// current subgoal. Every subgoal carries the instance cell as its position.
// Instances on `exclude` cells are skipped for pickups.
CompletionResponse oracle_complete(const world::WorldState& truth, const Subgoal& current,
                                   const std::vector<world::Cell>& exclude = {});

} // namespace taskgrid::completer
