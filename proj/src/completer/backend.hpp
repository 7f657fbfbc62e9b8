#pragma once

#include "completer/oracle.hpp"
#include "completer/prompt.hpp"

#include <chrono>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <string>

namespace taskgrid::completer {

struct CompletionRequest {
    PromptBundle bundle;
    Subgoal current;
    // Cells the agent has put things on; oracle pickups skip them.
    std::vector<world::Cell> exclude;
    // Live world, read only by the oracle backend.
    const world::WorldState* truth = nullptr;
};

class Backend {
public:
    virtual ~Backend() = default;
    virtual std::string_view kind() const = 0;
    // Returns the raw response text.
    virtual std::string complete(const CompletionRequest& request) = 0;
};

class OracleBackend : public Backend {
public:
    std::string_view kind() const override { return "oracle"; }
    std::string complete(const CompletionRequest& request) override;
};

// Canned responses keyed by prompt hash. Entries with hash "*" answer any
// prompt, in file order, once each.
class ScriptedBackend : public Backend {
public:
    void load_jsonl(const std::string& path);
    void add(const std::string& hash, const std::string& response);
    std::string_view kind() const override { return "scripted"; }
    std::string complete(const CompletionRequest& request) override;

private:
    std::mutex mu_;
    std::map<std::string, std::deque<std::string>> by_hash_;
};

struct HttpConfig {
    std::string endpoint;   // e.g. http://localhost:8000/v1/chat/completions
    std::string model;
    std::string api_key;
    double temperature = 0.0;
    int retries = 3;
    std::chrono::milliseconds backoff{250};
    std::chrono::seconds timeout{60};

    // LLM_ENDPOINT, LLM_MODEL, LLM_API_KEY.
    static HttpConfig from_env();
};

// OpenAI-style chat completion endpoint; system and agent messages are sent
// as the system and user roles.
class HttpBackend : public Backend {
public:
    explicit HttpBackend(HttpConfig config) : config_(std::move(config)) {}
    std::string_view kind() const override { return "http"; }
    std::string complete(const CompletionRequest& request) override;
    const HttpConfig& config() const { return config_; }

private:
    HttpConfig config_;
};

// "oracle", "scripted:<path>" or "http".
std::unique_ptr<Backend> make_backend(const std::string& spec);

} // namespace taskgrid::completer
