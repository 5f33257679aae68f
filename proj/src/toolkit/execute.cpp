#include <future>
#include <thread>

#include "climagent/core/error.hpp"
#include "climagent/core/time.hpp"
#include "climagent/toolkit/observation.hpp"

namespace climagent::toolkit {

using nlohmann::json;

json Observation::to_json() const {
    json j;
    j["tool"] = tool;
    j["status"] = status.ok ? json{{"ok", true}} : json{{"ok", false}, {"code", status.code}, {"message", status.message}};
    j["payload"] = payload;
    if (units) j["units"] = *units;
    if (timestamps) j["timestamps"] = {{"start", timestamps->first}, {"end", timestamps->second}};
    if (location) j["location"] = {{"lat", location->lat()}, {"lon", location->lon()}};
    if (uncertainty) j["uncertainty"] = *uncertainty;
    return j;
}

Observation Observation::from_json(const json& j) {
    Observation o;
    o.tool = j.at("tool").get<std::string>();
    const auto& st = j.at("status");
    o.status.ok = st.at("ok").get<bool>();
    if (!o.status.ok) {
        o.status.code = st.value("code", "");
        o.status.message = st.value("message", "");
    }
    o.payload = j.value("payload", json());
    if (j.contains("units")) o.units = j["units"].get<std::string>();
    if (j.contains("timestamps"))
        o.timestamps = {j["timestamps"].at("start").get<std::string>(), j["timestamps"].at("end").get<std::string>()};
    if (j.contains("location"))
        o.location = core::GeoPoint(j["location"].at("lat").get<double>(), j["location"].at("lon").get<double>());
    if (j.contains("uncertainty")) o.uncertainty = j["uncertainty"].get<double>();
    return o;
}

Observation Observation::failure(std::string tool, std::string code, std::string message) {
    Observation o;
    o.tool = std::move(tool);
    o.payload = json();
    o.status = ObservationStatus::error(std::move(code), std::move(message));
    return o;
}

namespace {

void normalize_quantity_object(json& obj, const core::UnitTable& units) {
    const auto variable = obj["variable"].get<std::string>();
    const auto unit = obj["unit"].get<std::string>();
    if (!units.has_variable(variable))
        throw Error(ErrorCode::UnknownVariable, "payload variable '" + variable + "' has no canonical unit");
    const auto& canonical = units.canonical_unit(variable);
    if (unit != canonical) {
        auto convert = [&](json& v) {
            if (v.is_number()) v = units.to_canonical(v.get<double>(), unit, variable).first;
        };
        // Validate the unit even when there is nothing numeric to convert.
        units.to_canonical(0.0, unit, variable);
        for (const char* key : {"value", "min", "max", "mean", "threshold"})
            if (obj.contains(key)) convert(obj[key]);
        if (obj.contains("points") && obj["points"].is_array())
            for (auto& p : obj["points"])
                if (p.is_object() && p.contains("value")) convert(p["value"]);
        obj["unit"] = canonical;
    }
}

bool is_quantity_object(const json& obj) {
    return obj.is_object() && obj.contains("variable") && obj["variable"].is_string() && obj.contains("unit") &&
           obj["unit"].is_string();
}

void walk(json& node, const core::UnitTable& units) {
    if (node.is_object()) {
        if (is_quantity_object(node)) normalize_quantity_object(node, units);
        for (auto& [key, child] : node.items()) {
            if ((key == "time" || key == "timestamp") && child.is_string())
                child = core::format_iso(core::normalize_timestamp(child.get<std::string>()));
            else
                walk(child, units);
        }
    } else if (node.is_array()) {
        for (auto& child : node) walk(child, units);
    }
}

bool fail_why(std::string* why, const char* msg) {
    if (why) *why = msg;
    return false;
}

bool is_num_or_null(const json& v) { return v.is_number() || v.is_null(); }

bool quantity_shape(const json& q) {
    return q.is_object() && q.contains("variable") && q["variable"].is_string() && q.contains("unit") &&
           q["unit"].is_string() && q.contains("value") && is_num_or_null(q["value"]);
}

bool series_shape(const json& s) {
    if (!s.is_object() || !s.contains("variable") || !s.contains("unit") || !s.contains("points") ||
        !s["points"].is_array())
        return false;
    for (const auto& p : s["points"])
        if (!p.is_object() || !p.contains("time") || !p["time"].is_string() || !p.contains("value") ||
            !is_num_or_null(p["value"]))
            return false;
    return true;
}

}  // namespace

void normalize_payload(json& payload, const core::UnitTable& units) { walk(payload, units); }

bool payload_matches(ReturnKind kind, const json& p, std::string* why) {
    if (!p.is_object()) return fail_why(why, "payload is not an object");
    switch (kind) {
        case ReturnKind::geopoint:
            if (!p.contains("lat") || !p["lat"].is_number() || !p.contains("lon") || !p["lon"].is_number())
                return fail_why(why, "geopoint needs numeric lat/lon");
            return true;
        case ReturnKind::record:
            if (!p.contains("quantities") || !p["quantities"].is_array() || p["quantities"].empty())
                return fail_why(why, "record needs a non-empty quantities list");
            for (const auto& q : p["quantities"])
                if (!quantity_shape(q)) return fail_why(why, "malformed quantity");
            return true;
        case ReturnKind::series:
            if (!p.contains("series") || !p["series"].is_array() || p["series"].empty())
                return fail_why(why, "series payload needs a non-empty series list");
            for (const auto& s : p["series"])
                if (!series_shape(s)) return fail_why(why, "malformed series");
            return true;
        case ReturnKind::analysis:
            if (!p.contains("stats") || !p["stats"].is_object() || !p.contains("trend") || !p["trend"].is_object() ||
                !p.contains("variable") || !p.contains("unit"))
                return fail_why(why, "analysis needs variable, unit, stats and trend");
            return true;
        case ReturnKind::image:
            if (!p.contains("image_ref") || !p["image_ref"].is_string() || !p.contains("width") ||
                !p.contains("height"))
                return fail_why(why, "image needs image_ref, width, height");
            return true;
        case ReturnKind::index_map:
            if (!p.contains("index") || !p.contains("values") || !p["values"].is_array() || !p.contains("stats"))
                return fail_why(why, "index map needs index, values, stats");
            return true;
        case ReturnKind::change_report:
            if (!p.contains("delta_map") || !p.contains("degraded_area_fraction") ||
                !p["degraded_area_fraction"].is_number())
                return fail_why(why, "change report needs delta_map and degraded_area_fraction");
            return true;
        case ReturnKind::quantity:
            if (!quantity_shape(p) || !p["value"].is_number()) return fail_why(why, "malformed quantity");
            return true;
        case ReturnKind::search_results:
            if (!p.contains("results") || !p["results"].is_array()) return fail_why(why, "missing results");
            for (const auto& r : p["results"])
                if (!r.is_object() || !r.contains("title") || !r.contains("url") || !r.contains("snippet"))
                    return fail_why(why, "search result needs title, url, snippet");
            return true;
        case ReturnKind::text:
            if (!p.contains("summary") || !p["summary"].is_string()) return fail_why(why, "missing summary text");
            return true;
        case ReturnKind::candidates: {
            if (!p.contains("candidates") || !p["candidates"].is_array()) return fail_why(why, "missing candidates");
            double prev = 2.0;
            for (const auto& c : p["candidates"]) {
                if (!c.is_object() || !c.contains("species") || !c.contains("confidence") ||
                    !c["confidence"].is_number())
                    return fail_why(why, "malformed candidate");
                double conf = c["confidence"].get<double>();
                if (conf < 0.0 || conf > 1.0) return fail_why(why, "confidence outside [0, 1]");
                if (conf > prev) return fail_why(why, "candidates not sorted by confidence");
                prev = conf;
            }
            return true;
        }
    }
    return fail_why(why, "unknown return kind");
}

Observation execute(const ToolCall& call, const ToolRegistry& registry, const core::UnitTable& units) {
    auto verdict = validate_call(call, registry);
    if (!verdict.ok()) return Observation::failure(call.tool, std::string(to_string(verdict.kind)), verdict.describe());
    const ToolBinding& binding = *registry.binding(call.tool);

    auto signature = std::make_shared<ToolSignature>(binding.signature);
    auto call_copy = std::make_shared<ToolCall>(call);
    auto promise = std::make_shared<std::promise<ToolOutput>>();
    auto future = promise->get_future();
    auto lock = registry.serialization_lock(call.tool);
    auto task = [executor = binding.executor, signature, call_copy, promise, lock] {
        try {
            std::unique_lock<std::mutex> guard;
            if (lock) guard = std::unique_lock<std::mutex>(*lock);
            ArgView args(*signature, *call_copy);
            promise->set_value(executor(args));
        } catch (...) {
            promise->set_exception(std::current_exception());
        }
    };

    if (binding.timeout.count() <= 0) {
        task();
    } else {
        // A timed-out executor is abandoned; it owns copies of everything it touches.
        std::thread(std::move(task)).detach();
        if (future.wait_for(binding.timeout) == std::future_status::timeout)
            return Observation::failure(call.tool, "timeout",
                                        "executor exceeded " + std::to_string(binding.timeout.count()) + " ms");
    }

    ToolOutput out;
    try {
        out = future.get();
    } catch (const Error& e) {
        return Observation::failure(call.tool, std::string(to_string(e.code())), e.what());
    } catch (const std::exception& e) {
        return Observation::failure(call.tool, "executor_error", e.what());
    }

    try {
        normalize_payload(out.payload, units);
    } catch (const Error& e) {
        return Observation::failure(call.tool, "unit_error", e.what());
    }
    std::string why;
    if (!payload_matches(binding.signature.returns, out.payload, &why))
        return Observation::failure(call.tool, "schema_violation", why);

    Observation obs;
    obs.tool = call.tool;
    obs.payload = std::move(out.payload);
    obs.timestamps = std::move(out.timespan);
    obs.location = out.location;
    obs.uncertainty = out.uncertainty;
    const auto& p = obs.payload;
    if (p.contains("unit") && p["unit"].is_string()) {
        obs.units = p["unit"].get<std::string>();
    } else if (p.contains("quantities") && p["quantities"].size() == 1) {
        obs.units = p["quantities"][0]["unit"].get<std::string>();
    } else if (p.contains("series") && p["series"].is_array() && p["series"].size() == 1) {
        obs.units = p["series"][0]["unit"].get<std::string>();
    }
    obs.status = ObservationStatus::success();
    return obs;
}

}  // namespace climagent::toolkit
