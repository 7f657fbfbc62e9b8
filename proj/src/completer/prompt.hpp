#pragma once

#include "world/subgoal.hpp"

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace taskgrid::completer {

using world::Subgoal;

class TemplateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct PromptBundle {
    std::string system_message;
    std::string agent_message;
    bool operator==(const PromptBundle&) const = default;
};

struct TaskProgress {
    std::vector<Subgoal> completed;
    Subgoal current;
    std::vector<Subgoal> all;
};

struct Templates {
    std::string system;
    std::string agent;
    std::string primitive_actions;
    std::string response_format;

    // Reads system.txt, agent.txt, primitive_actions.txt and
    // response_format.txt from `dir`.
    static Templates load(const std::string& dir);
    // The directory baked in at build time, overridable by TASKGRID_TEMPLATES.
    static const Templates& defaults();
};

std::string default_template_dir();

// Replaces every {{name}}. Throws TemplateError if a placeholder has no
// value.
std::string render(const std::string& text, const std::map<std::string, std::string>& values);

// ['CounterTop', 'StoveBurner']
std::string python_list(const std::vector<std::string>& items);

PromptBundle build_prompt(const Templates& templates, const world::TaskSpec& task, const TaskProgress& progress,
                          const std::vector<std::string>& observed, const std::vector<std::string>& possible,
                          const std::string& last_message);

// SHA-256 of system message, a newline, and agent message, as lower-case hex.
std::string prompt_hash(const PromptBundle& bundle);
std::string sha256_hex(const std::string& text);

} // namespace taskgrid::completer
