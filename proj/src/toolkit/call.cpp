#include "climagent/toolkit/call.hpp"

#include <cctype>
#include <nlohmann/json.hpp>

#include "climagent/toolkit/signature.hpp"

namespace climagent::toolkit {

namespace {

using nlohmann::json;

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

// An unfenced JSON object carrying a "tool" key is a broken call, not prose.
bool looks_like_bare_call(std::string_view text) {
    auto t = trim(text);
    if (t.empty() || t.front() != '{') return false;
    return t.find("\"tool\"") != std::string_view::npos;
}

ParsedEmission parse_body(std::string_view body) {
    json j = json::parse(body.begin(), body.end(), nullptr, false);
    if (j.is_discarded()) return FormatError{"call body is not valid JSON"};
    if (!j.is_object()) return FormatError{"call body must be an object"};
    for (const auto& [key, _] : j.items())
        if (key != "tool" && key != "args") return FormatError{"unexpected field '" + key + "' in call"};
    if (!j.contains("tool") || !j["tool"].is_string()) return FormatError{"call needs a string 'tool' field"};
    if (!j.contains("args") || !j["args"].is_object()) return FormatError{"call needs an object 'args' field"};
    ToolCall call;
    call.tool = j["tool"].get<std::string>();
    if (!is_identifier(call.tool)) return FormatError{"tool name '" + call.tool + "' is not an identifier"};
    for (const auto& [key, value] : j["args"].items()) {
        if (value.is_string()) {
            call.args[key] = value.get<std::string>();
        } else if (value.is_number() || value.is_boolean()) {
            call.args[key] = value.dump();
        } else {
            return FormatError{"argument '" + key + "' must be a scalar"};
        }
    }
    return call;
}

}  // namespace

ParsedEmission parse_call(std::string_view text) {
    auto open = text.find(kCallFenceOpen);
    if (open == std::string_view::npos) {
        if (looks_like_bare_call(text)) return FormatError{"tool call without ```tool_call fence"};
        return FinalAnswer{std::string(trim(text))};
    }
    auto after_open = open + kCallFenceOpen.size();
    auto eol = text.find('\n', after_open);
    if (eol == std::string_view::npos || !trim(text.substr(after_open, eol - after_open)).empty())
        return FormatError{"call fence must be followed by a newline"};
    // Closing fence: first ``` outside a JSON string literal.
    std::size_t close = std::string_view::npos;
    bool in_string = false;
    for (std::size_t i = eol + 1; i < text.size(); ++i) {
        char c = text[i];
        if (in_string) {
            if (c == '\\') ++i;
            else if (c == '"') in_string = false;
        } else if (c == '"') {
            in_string = true;
        } else if (text.substr(i, kCallFenceClose.size()) == kCallFenceClose) {
            close = i;
            break;
        }
    }
    if (close == std::string_view::npos) return FormatError{"unterminated call block"};
    auto body = trim(text.substr(eol + 1, close - eol - 1));
    if (body.empty()) return FormatError{"empty call block"};
    auto rest = text.substr(close + kCallFenceClose.size());
    if (rest.find(kCallFenceOpen) != std::string_view::npos) return FormatError{"more than one call block"};
    return parse_body(body);
}

std::string serialize_call(const ToolCall& call) {
    json args = json::object();
    for (const auto& [k, v] : call.args) args[k] = v;
    json j{{"tool", call.tool}, {"args", args}};
    return std::string(kCallFenceOpen) + "\n" + j.dump() + "\n" + std::string(kCallFenceClose);
}

std::string call_grammar_instructions() {
    return "To call a tool, reply with exactly one block of the form\n"
           "```tool_call\n"
           "{\"tool\": \"<tool name>\", \"args\": {\"<param>\": \"<value>\"}}\n"
           "```\n"
           "One call per reply. Argument values are quoted scalars. Dates are YYYY-MM-DD.\n"
           "When you have enough evidence, reply with plain text (no call block) as the final answer,\n"
           "citing supporting steps as [n].\n";
}

}  // namespace climagent::toolkit
