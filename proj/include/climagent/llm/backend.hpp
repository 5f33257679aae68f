#pragma once

#include <chrono>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace climagent::llm {

struct Message {
    std::string role;  // system | user | assistant | tool
    std::string content;
};

/// One completion request. `channel` names the task (agent, route,
/// summary, summarize, keywords, refine, facts, qa, visual_qa, synthesize);
/// `turn` is the caller's step index within that task.
struct ChatRequest {
    std::string channel;
    std::vector<Message> messages;
    int turn = 0;

    /// Content of the first user message; empty when there is none.
    const std::string& first_user() const;
};

class Backend {
public:
    virtual ~Backend() = default;
    /// Throws Error(BackendFailure) when no emission can be produced.
    virtual std::string complete(const ChatRequest& request) = 0;
    virtual std::string describe() const = 0;
};

/// Deterministic replay backend.
///
/// Replay file format (JSON):
///   {"format": "scripted-replay/1",
///    "scripts": [{"channel": "agent", "match": "Doha",
///                 "emissions": ["...", "..."], "repeat_last": false}]}
///
/// The first script whose channel equals the request channel and whose
/// optional `match` occurs in the first user message is selected; the
/// emission is `emissions[turn]`. Past the end, `repeat_last` replays the
/// final entry, otherwise the request fails.
class ScriptedBackend final : public Backend {
public:
    struct Script {
        std::string channel;
        std::optional<std::string> match;
        std::vector<std::string> emissions;
        bool repeat_last = false;
    };

    ScriptedBackend() = default;
    explicit ScriptedBackend(std::vector<Script> scripts) : scripts_(std::move(scripts)) {}

    static ScriptedBackend from_json(const nlohmann::json& j);
    static ScriptedBackend load(const std::filesystem::path& path);
    nlohmann::json to_json() const;

    void add(Script script) { scripts_.push_back(std::move(script)); }
    const std::vector<Script>& scripts() const noexcept { return scripts_; }

    std::string complete(const ChatRequest& request) override;
    std::string describe() const override;

private:
    std::vector<Script> scripts_;
};

struct RemoteConfig {
    std::string endpoint;  // e.g. https://api.example.com/v1
    std::string model;
    std::string api_key_env;  // name of the env var holding the key
    std::chrono::seconds timeout{60};
    double temperature = 0.0;
};

/// OpenAI-compatible chat-completions client: POST {endpoint}/chat/completions.
/// Tool observations are sent as user messages prefixed "Observation:".
class RemoteChatBackend final : public Backend {
public:
    explicit RemoteChatBackend(RemoteConfig config);

    std::string complete(const ChatRequest& request) override;
    std::string describe() const override;

    nlohmann::json build_body(const ChatRequest& request) const;

private:
    RemoteConfig config_;
    std::string scheme_host_port_;
    std::string path_prefix_;
};

}  // namespace climagent::llm
