#include "completer/parser.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace taskgrid::completer {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

// "Reason:" / "**Plan**:" -> remainder after the colon, if the label matches.
bool labelled(const std::string& line, const std::string& label, std::string& rest) {
    std::string l = lower(line);
    std::string stripped;
    for (char c : l) {
        if (c != '*' && c != '#') stripped.push_back(c);
    }
    stripped = trim(stripped);
    if (!stripped.starts_with(label)) return false;
    const std::string after = trim(stripped.substr(label.size()));
    if (!after.empty() && after.front() != ':') return false;
    const auto colon = line.find(':');
    rest = colon == std::string::npos ? "" : trim(line.substr(colon + 1));
    return true;
}

// Strips "1." / "2)" / "-" / "*" markers; false when the line has none.
bool strip_marker(std::string& line) {
    std::size_t i = 0;
    while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
    if (i > 0 && i < line.size() && (line[i] == '.' || line[i] == ')' || line[i] == ':')) {
        line = trim(line.substr(i + 1));
        return true;
    }
    if (!line.empty() && (line[0] == '-' || line[0] == '*')) {
        line = trim(line.substr(1));
        return true;
    }
    return false;
}

Subgoal parse_step(const std::string& raw, const std::vector<std::string>& possible) {
    std::string text;
    for (char c : raw) text.push_back(c == ',' || c == '(' || c == ')' || c == '`' || c == '\'' ? ' ' : c);
    std::istringstream in(text);
    std::vector<std::string> tokens;
    for (std::string t; in >> t;) tokens.push_back(t);
    if (tokens.size() < 2) throw ParseError(ParseErrorKind::MalformedStructure, "plan step '" + raw + "'");
    // Shortest action prefix whose remainder names a category.
    std::optional<std::string> unknown_object;
    for (std::size_t k = 1; k < tokens.size(); ++k) {
        std::string action, object;
        for (std::size_t i = 0; i < tokens.size(); ++i) {
            std::string& dst = i < k ? action : object;
            if (!dst.empty()) dst += " ";
            dst += tokens[i];
        }
        const auto a = world::parse_subgoal_action(action);
        if (!a) continue;
        const auto c = world::parse_category(object);
        if (!c) {
            unknown_object = object;
            continue;
        }
        const std::string cname(world::name(*c));
        if (std::find(possible.begin(), possible.end(), cname) == possible.end()) {
            throw ParseError(ParseErrorKind::HallucinatedObject, cname);
        }
        return Subgoal{*a, *c, std::nullopt, -1};
    }
    if (unknown_object) throw ParseError(ParseErrorKind::HallucinatedObject, *unknown_object);
    throw ParseError(ParseErrorKind::MalformedStructure, "no action in plan step '" + raw + "'");
}

} // namespace

std::string_view parse_error_name(ParseErrorKind k) {
    switch (k) {
        case ParseErrorKind::MalformedStructure: return "malformed-structure";
        case ParseErrorKind::HallucinatedObject: return "hallucinated-object";
        case ParseErrorKind::MissingTerminalSubgoal: return "missing-terminal-subgoal";
    }
    return "unknown";
}

ParseError::ParseError(ParseErrorKind kind, const std::string& detail)
    : std::runtime_error(std::string(parse_error_name(kind)) + ": " + detail), kind_(kind) {}

CompletionResponse parse_response(const std::string& text, const std::vector<std::string>& possible,
                                  const Subgoal& current) {
    std::istringstream in(text);
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);) lines.push_back(trim(line));

    CompletionResponse r;
    bool seen_reason = false, seen_plan = false, in_plan = false;
    for (const auto& line : lines) {
        std::string rest;
        if (!seen_plan && labelled(line, "plan", rest)) {
            seen_plan = true;
            in_plan = true;
            if (!rest.empty()) {
                std::string step = rest;
                strip_marker(step);
                r.subgoals.push_back(parse_step(step, possible));
            }
            continue;
        }
        if (!seen_reason && !seen_plan && labelled(line, "reason", rest)) {
            seen_reason = true;
            r.reasoning = rest;
            continue;
        }
        if (in_plan) {
            if (line.empty()) {
                if (!r.subgoals.empty()) in_plan = false;
                continue;
            }
            std::string step = line;
            if (!strip_marker(step)) {
                in_plan = false;
                continue;
            }
            r.subgoals.push_back(parse_step(step, possible));
        } else if (seen_reason && !seen_plan && !line.empty()) {
            r.reasoning += (r.reasoning.empty() ? "" : " ") + line;
        }
    }
    if (!seen_reason) throw ParseError(ParseErrorKind::MalformedStructure, "missing 'Reason:' section");
    if (!seen_plan) throw ParseError(ParseErrorKind::MalformedStructure, "missing 'Plan:' section");
    if (r.subgoals.empty()) throw ParseError(ParseErrorKind::MalformedStructure, "empty plan");
    if (!r.subgoals.back().same_step(current)) {
        throw ParseError(ParseErrorKind::MissingTerminalSubgoal,
                         "last step is " + world::to_string(r.subgoals.back()) + ", expected " +
                             world::to_string(current));
    }
    return r;
}

std::string format_response(const CompletionResponse& response) {
    std::string out = "Reason: " + response.reasoning + "\nPlan:\n";
    for (std::size_t i = 0; i < response.subgoals.size(); ++i) {
        out += std::to_string(i + 1) + ". " + world::to_string(response.subgoals[i]) + "\n";
    }
    return out;
}

} // namespace taskgrid::completer
