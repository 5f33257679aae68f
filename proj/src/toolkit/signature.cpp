#include "climagent/toolkit/signature.hpp"

#include <set>

#include "climagent/core/error.hpp"

namespace climagent::toolkit {

std::string_view to_string(Category c) {
    switch (c) {
        case Category::remote_sensing: return "remote_sensing";
        case Category::biodiversity: return "biodiversity";
        case Category::web: return "web";
        case Category::carbon: return "carbon";
        case Category::air_quality: return "air_quality";
        case Category::weather_hydrology: return "weather_hydrology";
        case Category::geospatial: return "geospatial";
    }
    return "?";
}

std::string_view category_title(Category c) {
    switch (c) {
        case Category::remote_sensing: return "Remote sensing and land surface";
        case Category::biodiversity: return "Biodiversity and species";
        case Category::web: return "Web retrieval and summarization";
        case Category::carbon: return "Carbon and sustainability";
        case Category::air_quality: return "Air quality and health indices";
        case Category::weather_hydrology: return "Weather, rainfall, and hydrology";
        case Category::geospatial: return "Geospatial utility";
    }
    return "?";
}

std::optional<Category> parse_category(std::string_view text) {
    for (auto c : kCategoryOrder)
        if (to_string(c) == text) return c;
    return std::nullopt;
}

std::string_view to_string(ParamType t) {
    switch (t) {
        case ParamType::real: return "real";
        case ParamType::integer: return "integer";
        case ParamType::string: return "string";
        case ParamType::date: return "date";
        case ParamType::geopoint: return "geopoint";
        case ParamType::image_ref: return "image_ref";
        case ParamType::audio_ref: return "audio_ref";
        case ParamType::series_ref: return "series_ref";
    }
    return "?";
}

std::optional<ParamType> parse_param_type(std::string_view text) {
    for (auto t : {ParamType::real, ParamType::integer, ParamType::string, ParamType::date, ParamType::geopoint,
                   ParamType::image_ref, ParamType::audio_ref, ParamType::series_ref})
        if (to_string(t) == text) return t;
    return std::nullopt;
}

std::string_view to_string(ReturnKind k) {
    switch (k) {
        case ReturnKind::geopoint: return "geopoint";
        case ReturnKind::record: return "record";
        case ReturnKind::series: return "series";
        case ReturnKind::analysis: return "analysis";
        case ReturnKind::image: return "image";
        case ReturnKind::index_map: return "index_map";
        case ReturnKind::change_report: return "change_report";
        case ReturnKind::quantity: return "quantity";
        case ReturnKind::search_results: return "search_results";
        case ReturnKind::text: return "text";
        case ReturnKind::candidates: return "candidates";
    }
    return "?";
}

bool is_identifier(std::string_view s) {
    if (s.empty()) return false;
    auto head = [](char c) { return (c >= 'a' && c <= 'z') || c == '_'; };
    auto tail = [&](char c) { return head(c) || (c >= '0' && c <= '9'); };
    if (!head(s[0])) return false;
    for (char c : s.substr(1))
        if (!tail(c)) return false;
    return true;
}

const ParamSpec* ToolSignature::param(std::string_view param_name) const {
    for (const auto& p : params)
        if (p.name == param_name) return &p;
    return nullptr;
}

std::vector<std::string> ToolSignature::required_params() const {
    std::vector<std::string> out;
    for (const auto& p : params)
        if (p.required) out.push_back(p.name);
    return out;
}

void ToolSignature::validate() const {
    if (!is_identifier(name)) throw Error(ErrorCode::InvalidArgument, "invalid tool name '" + name + "'");
    std::set<std::string_view> seen;
    for (const auto& p : params) {
        if (!is_identifier(p.name))
            throw Error(ErrorCode::InvalidArgument, "tool " + name + ": invalid param name '" + p.name + "'");
        if (!seen.insert(p.name).second)
            throw Error(ErrorCode::InvalidArgument, "tool " + name + ": duplicate param '" + p.name + "'");
    }
}

}  // namespace climagent::toolkit
