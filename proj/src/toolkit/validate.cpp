#include <charconv>
#include <cmath>

#include "climagent/core/error.hpp"
#include "climagent/core/time.hpp"
#include "climagent/toolkit/observation.hpp"

namespace climagent::toolkit {

std::string_view to_string(ArgIssue::Kind k) {
    switch (k) {
        case ArgIssue::Kind::missing: return "missing";
        case ArgIssue::Kind::unknown: return "unknown";
        case ArgIssue::Kind::type: return "type";
    }
    return "?";
}

std::string_view to_string(ValidationVerdict::Kind k) {
    switch (k) {
        case ValidationVerdict::Kind::ok: return "ok";
        case ValidationVerdict::Kind::format_error: return "format_error";
        case ValidationVerdict::Kind::unknown_tool: return "unknown_tool";
        case ValidationVerdict::Kind::arg_error: return "arg_error";
    }
    return "?";
}

std::string ValidationVerdict::describe() const {
    std::string out(to_string(kind));
    if (!detail.empty()) out += ": " + detail;
    for (const auto& i : issues) {
        out += "; ";
        out += to_string(i.kind);
        out += " '" + i.name + "'";
        if (!i.detail.empty()) out += " (" + i.detail + ")";
    }
    return out;
}

namespace {

bool full_double(std::string_view s, double& v) {
    if (s.empty()) return false;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    return ec == std::errc{} && p == s.data() + s.size() && std::isfinite(v);
}

bool full_integer(std::string_view s, long long& v) {
    if (s.empty()) return false;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    return ec == std::errc{} && p == s.data() + s.size();
}

bool in_bounds(double v, const ParamSpec& spec, std::string* why) {
    if ((spec.min && v < *spec.min) || (spec.max && v > *spec.max)) {
        if (why) {
            *why = "out of range";
            if (spec.min) *why += " min " + std::to_string(*spec.min);
            if (spec.max) *why += " max " + std::to_string(*spec.max);
        }
        return false;
    }
    return true;
}

}  // namespace

bool coercible(std::string_view text, const ParamSpec& spec, std::string* why) {
    auto set = [why](const char* msg) {
        if (why) *why = msg;
        return false;
    };
    switch (spec.type) {
        case ParamType::real: {
            double v;
            if (!full_double(text, v)) return set("expected real");
            return in_bounds(v, spec, why);
        }
        case ParamType::integer: {
            long long v;
            if (!full_integer(text, v)) return set("expected integer");
            return in_bounds(static_cast<double>(v), spec, why);
        }
        case ParamType::string:
            if (text.empty()) return set("expected non-empty string");
            return true;
        case ParamType::date:
            try {
                core::parse_date(text);
                return true;
            } catch (const Error&) {
                return set("expected YYYY-MM-DD date");
            }
        case ParamType::geopoint: {
            auto comma = text.find(',');
            double lat, lon;
            if (comma == std::string_view::npos || !full_double(text.substr(0, comma), lat) ||
                !full_double(text.substr(comma + 1), lon))
                return set("expected lat,lon");
            if (lat < -90 || lat > 90 || lon < -180 || lon > 180) return set("coordinates out of range");
            return true;
        }
        case ParamType::image_ref:
        case ParamType::audio_ref:
        case ParamType::series_ref:
            if (text.empty()) return set("expected reference id");
            for (char c : text)
                if (std::isspace(static_cast<unsigned char>(c))) return set("reference ids contain no whitespace");
            return true;
    }
    return set("unsupported type");
}

ValidationVerdict validate_call(const ToolCall& call, const ToolRegistry& registry) {
    ValidationVerdict v;
    if (!is_identifier(call.tool)) {
        v.kind = ValidationVerdict::Kind::format_error;
        v.detail = "tool name is not an identifier";
        return v;
    }
    const ToolSignature* sig = registry.find(call.tool);
    if (!sig) {
        v.kind = ValidationVerdict::Kind::unknown_tool;
        v.detail = call.tool;
        return v;
    }
    for (const auto& p : sig->params) {
        auto it = call.args.find(p.name);
        if (it == call.args.end()) {
            if (p.required) v.issues.push_back({ArgIssue::Kind::missing, p.name, std::string(to_string(p.type))});
            continue;
        }
        std::string why;
        if (!coercible(it->second, p, &why)) v.issues.push_back({ArgIssue::Kind::type, p.name, why});
    }
    for (const auto& [name, _] : call.args)
        if (!sig->param(name)) v.issues.push_back({ArgIssue::Kind::unknown, name, {}});
    if (!v.issues.empty()) v.kind = ValidationVerdict::Kind::arg_error;
    return v;
}

ValidationVerdict validate_emission(const ParsedEmission& emission, const ToolRegistry& registry) {
    if (const auto* call = std::get_if<ToolCall>(&emission)) return validate_call(*call, registry);
    ValidationVerdict v;
    if (const auto* fe = std::get_if<FormatError>(&emission)) {
        v.kind = ValidationVerdict::Kind::format_error;
        v.detail = fe->reason;
    }
    return v;
}

}  // namespace climagent::toolkit
