#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "climagent/core/types.hpp"
#include "climagent/core/units.hpp"
#include "climagent/toolkit/registry.hpp"

namespace climagent::toolkit {

struct ObservationStatus {
    bool ok = true;
    std::string code;  // empty when ok
    std::string message;

    static ObservationStatus success() { return {}; }
    static ObservationStatus error(std::string code, std::string message) {
        return {false, std::move(code), std::move(message)};
    }
    friend bool operator==(const ObservationStatus&, const ObservationStatus&) = default;
};

/// Standardized envelope around a tool's output.
struct Observation {
    std::string tool;
    nlohmann::json payload;
    std::optional<std::string> units;
    std::optional<std::pair<std::string, std::string>> timestamps;
    std::optional<core::GeoPoint> location;
    std::optional<double> uncertainty;
    ObservationStatus status;

    nlohmann::json to_json() const;
    static Observation from_json(const nlohmann::json& j);
    static Observation failure(std::string tool, std::string code, std::string message);

    friend bool operator==(const Observation&, const Observation&) = default;
};

struct ArgIssue {
    enum class Kind { missing, unknown, type };
    Kind kind;
    std::string name;
    std::string detail;
    friend bool operator==(const ArgIssue&, const ArgIssue&) = default;
};

std::string_view to_string(ArgIssue::Kind k);

struct ValidationVerdict {
    enum class Kind { ok, format_error, unknown_tool, arg_error };
    Kind kind = Kind::ok;
    std::vector<ArgIssue> issues;  // arg_error only
    std::string detail;

    bool ok() const noexcept { return kind == Kind::ok; }
    std::string describe() const;
};

std::string_view to_string(ValidationVerdict::Kind k);

/// Total: every call maps to exactly one verdict; arg_error lists every
/// offending field.
ValidationVerdict validate_call(const ToolCall& call, const ToolRegistry& registry);
ValidationVerdict validate_emission(const ParsedEmission& emission, const ToolRegistry& registry);

/// True when `text` coerces to `type` (numeric strings to real/integer).
bool coercible(std::string_view text, const ParamSpec& spec, std::string* why = nullptr);

/// Runs a validated call. Executor failures, timeouts and schema
/// violations become error observations; quantities in the payload are
/// normalized to canonical units and ISO-8601 UTC timestamps.
Observation execute(const ToolCall& call, const ToolRegistry& registry,
                    const core::UnitTable& units = core::UnitTable::builtin());

/// Normalizes every {variable, unit, value|points} object in place.
void normalize_payload(nlohmann::json& payload, const core::UnitTable& units);

/// Structural check of a payload against its declared return kind.
bool payload_matches(ReturnKind kind, const nlohmann::json& payload, std::string* why = nullptr);

/// Category-grouped tool listing for the model prompt; deterministic.
std::string render_tool_prompt(const ToolRegistry& registry);

}  // namespace climagent::toolkit
