#include "completer/prompt.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace taskgrid::completer {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw TemplateError("cannot read template " + path);
    std::ostringstream os;
    os << in.rdbuf();
    std::string s = os.str();
    while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
    return s;
}

std::string subgoal_list(const std::vector<Subgoal>& subgoals) {
    std::vector<std::string> items;
    for (const auto& s : subgoals) items.push_back(world::to_string(s));
    return python_list(items);
}

} // namespace

std::string default_template_dir() {
    if (const char* env = std::getenv("TASKGRID_TEMPLATES"); env && *env) return env;
#ifdef TASKGRID_TEMPLATE_DIR
    return TASKGRID_TEMPLATE_DIR;
#else
    return "templates";
#endif
}

Templates Templates::load(const std::string& dir) {
    return {read_file(dir + "/system.txt"), read_file(dir + "/agent.txt"),
            read_file(dir + "/primitive_actions.txt"), read_file(dir + "/response_format.txt")};
}

const Templates& Templates::defaults() {
    static const Templates t = load(default_template_dir());
    return t;
}

std::string render(const std::string& text, const std::map<std::string, std::string>& values) {
    std::string out;
    std::size_t pos = 0;
    while (true) {
        const auto open = text.find("{{", pos);
        if (open == std::string::npos) {
            out.append(text, pos, std::string::npos);
            break;
        }
        const auto close = text.find("}}", open + 2);
        if (close == std::string::npos) throw TemplateError("unterminated placeholder");
        out.append(text, pos, open - pos);
        const std::string key = text.substr(open + 2, close - open - 2);
        const auto it = values.find(key);
        if (it == values.end()) throw TemplateError("missing value for placeholder {{" + key + "}}");
        out += it->second;
        pos = close + 2;
    }
    return out;
}

std::string python_list(const std::vector<std::string>& items) {
    std::string out = "[";
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += ", ";
        out += "'" + items[i] + "'";
    }
    return out + "]";
}

PromptBundle build_prompt(const Templates& t, const world::TaskSpec& task, const TaskProgress& progress,
                          const std::vector<std::string>& observed, const std::vector<std::string>& possible,
                          const std::string& last_message) {
    PromptBundle b;
    b.system_message = render(t.system, {{"primitive_actions", t.primitive_actions},
                                         {"response_format", t.response_format}});
    std::string steps;
    for (std::size_t i = 0; i < task.step_instructions.size(); ++i) {
        if (i) steps += "\n";
        steps += std::to_string(i + 1) + ". " + task.step_instructions[i];
    }
    b.agent_message = render(t.agent, {{"goal_statement", task.goal_statement},
                                       {"step_instructions", steps},
                                       {"possible_landmarks", python_list(possible)},
                                       {"completed_subgoals", subgoal_list(progress.completed)},
                                       {"current_subgoal", world::to_string(progress.current)},
                                       {"all_subgoals", subgoal_list(progress.all)},
                                       {"observed_landmarks", python_list(observed)},
                                       {"last_message", last_message.empty() ? "None" : last_message}});
    return b;
}

std::string prompt_hash(const PromptBundle& bundle) {
    return sha256_hex(bundle.system_message + "\n" + bundle.agent_message);
}

std::string sha256_hex(const std::string& text) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr);
    std::string hex;
    char buf[3];
    for (unsigned int i = 0; i < len; ++i) {
        std::snprintf(buf, sizeof buf, "%02x", digest[i]);
        hex += buf;
    }
    return hex;
}

} // namespace taskgrid::completer
