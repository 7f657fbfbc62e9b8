#pragma once

#include "world/subgoal.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace taskgrid::completer {

using world::Subgoal;

struct CompletionResponse {
    std::string reasoning;
    std::vector<Subgoal> subgoals;
};

enum class ParseErrorKind { MalformedStructure, HallucinatedObject, MissingTerminalSubgoal };
std::string_view parse_error_name(ParseErrorKind k);

class ParseError : public std::runtime_error {
public:
    ParseError(ParseErrorKind kind, const std::string& detail);
    ParseErrorKind kind() const { return kind_; }

private:
    ParseErrorKind kind_;
};

// Reads "Reason: ..." followed by "Plan:" and numbered "<Action> <Object>"
// lines. Case and whitespace tolerant. Throws ParseError.
CompletionResponse parse_response(const std::string& text, const std::vector<std::string>& possible,
                                  const Subgoal& current);

// Inverse of parse_response for a well-formed response.
std::string format_response(const CompletionResponse& response);

} // namespace taskgrid::completer
