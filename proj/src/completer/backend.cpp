#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "completer/backend.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <fstream>
#include <thread>

namespace taskgrid::completer {

using nlohmann::json;

std::string OracleBackend::complete(const CompletionRequest& request) {
    if (!request.truth) throw CompleterError(CompleterError::Kind::Config, "oracle backend needs scene truth");
    return format_response(oracle_complete(*request.truth, request.current, request.exclude));
}

void ScriptedBackend::load_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CompleterError(CompleterError::Kind::Config, "cannot read fixture " + path);
    for (std::string line; std::getline(in, line);) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const json j = json::parse(line);
        add(j.at("prompt_hash").get<std::string>(), j.at("response").get<std::string>());
    }
}

void ScriptedBackend::add(const std::string& hash, const std::string& response) {
    std::lock_guard lock(mu_);
    by_hash_[hash].push_back(response);
}

std::string ScriptedBackend::complete(const CompletionRequest& request) {
    std::lock_guard lock(mu_);
    for (const std::string& key : {prompt_hash(request.bundle), std::string("*")}) {
        auto it = by_hash_.find(key);
        if (it != by_hash_.end() && !it->second.empty()) {
            std::string r = std::move(it->second.front());
            it->second.pop_front();
            return r;
        }
    }
    throw CompleterError(CompleterError::Kind::FixtureExhausted, "fixture-exhausted: no scripted response left");
}

HttpConfig HttpConfig::from_env() {
    HttpConfig c;
    auto env = [](const char* k) {
        const char* v = std::getenv(k);
        return std::string(v ? v : "");
    };
    c.endpoint = env("LLM_ENDPOINT");
    c.model = env("LLM_MODEL");
    c.api_key = env("LLM_API_KEY");
    if (c.model.empty()) c.model = "gpt-3.5-turbo";
    return c;
}

std::string HttpBackend::complete(const CompletionRequest& request) {
    const std::string& url = config_.endpoint;
    const auto scheme_end = url.find("://");
    if (url.empty() || scheme_end == std::string::npos) {
        throw CompleterError(CompleterError::Kind::Config, "LLM_ENDPOINT must be an http(s) URL");
    }
    const auto path_start = url.find('/', scheme_end + 3);
    const std::string base = url.substr(0, path_start);
    const std::string path = path_start == std::string::npos ? "/v1/chat/completions" : url.substr(path_start);

    const json body = {{"model", config_.model},
                       {"temperature", config_.temperature},
                       {"messages", json::array({{{"role", "system"}, {"content", request.bundle.system_message}},
                                                 {{"role", "user"}, {"content", request.bundle.agent_message}}})}};
    httplib::Headers headers;
    if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);

    std::string last_error;
    for (int attempt = 0; attempt <= config_.retries; ++attempt) {
        if (attempt > 0) std::this_thread::sleep_for(config_.backoff * (1 << (attempt - 1)));
        httplib::Client client(base);
        client.set_connection_timeout(config_.timeout);
        client.set_read_timeout(config_.timeout);
        auto res = client.Post(path, headers, body.dump(), "application/json");
        if (!res) {
            last_error = httplib::to_string(res.error());
            continue;
        }
        if (res->status >= 500 || res->status == 429) {
            last_error = "HTTP " + std::to_string(res->status);
            continue;
        }
        if (res->status != 200) {
            throw CompleterError(CompleterError::Kind::Transport, "HTTP " + std::to_string(res->status) + ": " + res->body);
        }
        try {
            return json::parse(res->body).at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const json::exception& e) {
            throw CompleterError(CompleterError::Kind::Transport, std::string("bad completion payload: ") + e.what());
        }
    }
    throw CompleterError(CompleterError::Kind::Transport, "transport error after retries: " + last_error);
}

std::unique_ptr<Backend> make_backend(const std::string& spec) {
    if (spec == "oracle") return std::make_unique<OracleBackend>();
    if (spec == "http") return std::make_unique<HttpBackend>(HttpConfig::from_env());
    if (spec.starts_with("scripted:")) {
        auto b = std::make_unique<ScriptedBackend>();
        b->load_jsonl(spec.substr(9));
        return b;
    }
    throw CompleterError(CompleterError::Kind::Config, "unknown backend '" + spec + "'");
}

} // namespace taskgrid::completer
