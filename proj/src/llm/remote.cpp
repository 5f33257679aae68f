#include <cstdlib>

#include <httplib.h>

#include "climagent/core/error.hpp"
#include "climagent/llm/backend.hpp"

namespace climagent::llm {

using nlohmann::json;

namespace {

// Splits "https://host:port/v1" into ("https://host:port", "/v1").
std::pair<std::string, std::string> split_endpoint(const std::string& endpoint) {
    auto scheme = endpoint.find("://");
    if (scheme == std::string::npos) throw Error(ErrorCode::ConfigError, "endpoint needs a scheme: " + endpoint);
    auto slash = endpoint.find('/', scheme + 3);
    if (slash == std::string::npos) return {endpoint, ""};
    std::string prefix = endpoint.substr(slash);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    return {endpoint.substr(0, slash), prefix};
}

}  // namespace

RemoteChatBackend::RemoteChatBackend(RemoteConfig config) : config_(std::move(config)) {
    if (config_.endpoint.empty() || config_.model.empty())
        throw Error(ErrorCode::ConfigError, "remote backend needs endpoint and model");
    std::tie(scheme_host_port_, path_prefix_) = split_endpoint(config_.endpoint);
}

json RemoteChatBackend::build_body(const ChatRequest& request) const {
    json messages = json::array();
    for (const auto& m : request.messages) {
        if (m.role == "tool")
            messages.push_back({{"role", "user"}, {"content", "Observation: " + m.content}});
        else
            messages.push_back({{"role", m.role}, {"content", m.content}});
    }
    return {{"model", config_.model}, {"messages", messages}, {"temperature", config_.temperature}};
}

std::string RemoteChatBackend::complete(const ChatRequest& request) {
    httplib::Client client(scheme_host_port_);
    client.set_connection_timeout(config_.timeout);
    client.set_read_timeout(config_.timeout);
    httplib::Headers headers;
    if (!config_.api_key_env.empty()) {
        const char* key = std::getenv(config_.api_key_env.c_str());
        if (!key || !*key)
            throw Error(ErrorCode::ConfigError, "environment variable " + config_.api_key_env + " is not set");
        headers.emplace("Authorization", std::string("Bearer ") + key);
    }
    auto res = client.Post(path_prefix_ + "/chat/completions", headers, build_body(request).dump(),
                           "application/json");
    if (!res) throw Error(ErrorCode::BackendFailure, "chat endpoint unreachable: " + httplib::to_string(res.error()));
    if (res->status != 200)
        throw Error(ErrorCode::BackendFailure, "chat endpoint returned HTTP " + std::to_string(res->status));
    json body = json::parse(res->body, nullptr, false);
    if (body.is_discarded() || !body.contains("choices") || body["choices"].empty())
        throw Error(ErrorCode::BackendFailure, "chat endpoint returned no choices");
    const auto& msg = body["choices"][0].value("message", json::object());
    if (!msg.contains("content") || !msg["content"].is_string())
        throw Error(ErrorCode::BackendFailure, "chat endpoint returned no text content");
    return msg["content"].get<std::string>();
}

std::string RemoteChatBackend::describe() const { return "remote(" + config_.model + " @ " + config_.endpoint + ")"; }

}  // namespace climagent::llm
