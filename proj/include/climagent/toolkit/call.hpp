#pragma once

#include <map>
#include <string>
#include <string_view>
#include <variant>

namespace climagent::toolkit {

/// One typed tool invocation. Argument values keep their textual form;
/// coercion to the declared parameter type happens during validation.
struct ToolCall {
    std::string tool;
    std::map<std::string, std::string> args;

    friend bool operator==(const ToolCall&, const ToolCall&) = default;
};

struct FinalAnswer {
    std::string text;
    friend bool operator==(const FinalAnswer&, const FinalAnswer&) = default;
};

struct FormatError {
    std::string reason;
    friend bool operator==(const FormatError&, const FormatError&) = default;
};

using ParsedEmission = std::variant<ToolCall, FinalAnswer, FormatError>;

inline constexpr std::string_view kCallFenceOpen = "```tool_call";
inline constexpr std::string_view kCallFenceClose = "```";

/// Reads raw model output. A single fenced ```tool_call block holding
/// {"tool": ..., "args": {...}} is a call; text without any call block is a
/// final answer; everything else is a format error.
ParsedEmission parse_call(std::string_view text);

std::string serialize_call(const ToolCall& call);

/// Instructions appended to the tool prompt describing the grammar above.
std::string call_grammar_instructions();

}  // namespace climagent::toolkit
