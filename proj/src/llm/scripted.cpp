#include <fstream>

#include "climagent/core/error.hpp"
#include "climagent/llm/backend.hpp"

namespace climagent::llm {

using nlohmann::json;

const std::string& ChatRequest::first_user() const {
    static const std::string empty;
    for (const auto& m : messages)
        if (m.role == "user") return m.content;
    return empty;
}

ScriptedBackend ScriptedBackend::from_json(const json& j) {
    if (!j.is_object() || j.value("format", "") != "scripted-replay/1")
        throw Error(ErrorCode::ConfigError, "replay file must declare format scripted-replay/1");
    ScriptedBackend backend;
    for (const auto& s : j.at("scripts")) {
        Script script;
        script.channel = s.at("channel").get<std::string>();
        if (s.contains("match")) script.match = s["match"].get<std::string>();
        script.emissions = s.at("emissions").get<std::vector<std::string>>();
        script.repeat_last = s.value("repeat_last", false);
        backend.scripts_.push_back(std::move(script));
    }
    return backend;
}

ScriptedBackend ScriptedBackend::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ConfigError, "cannot open replay file " + path.string());
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw Error(ErrorCode::ConfigError, "replay file is not valid JSON: " + path.string());
    return from_json(j);
}

json ScriptedBackend::to_json() const {
    json scripts = json::array();
    for (const auto& s : scripts_) {
        json e{{"channel", s.channel}, {"emissions", s.emissions}};
        if (s.match) e["match"] = *s.match;
        if (s.repeat_last) e["repeat_last"] = true;
        scripts.push_back(std::move(e));
    }
    return {{"format", "scripted-replay/1"}, {"scripts", scripts}};
}

std::string ScriptedBackend::complete(const ChatRequest& request) {
    const auto& user = request.first_user();
    for (const auto& s : scripts_) {
        if (s.channel != request.channel) continue;
        if (s.match && user.find(*s.match) == std::string::npos) continue;
        if (request.turn < 0) break;
        auto idx = static_cast<std::size_t>(request.turn);
        if (idx < s.emissions.size()) return s.emissions[idx];
        if (s.repeat_last && !s.emissions.empty()) return s.emissions.back();
        throw Error(ErrorCode::BackendFailure,
                    "script for channel '" + request.channel + "' exhausted at turn " + std::to_string(request.turn));
    }
    throw Error(ErrorCode::BackendFailure, "no script for channel '" + request.channel + "'");
}

std::string ScriptedBackend::describe() const { return "scripted(" + std::to_string(scripts_.size()) + " scripts)"; }

}  // namespace climagent::llm
