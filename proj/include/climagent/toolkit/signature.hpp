#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace climagent::toolkit {

enum class Category { remote_sensing, biodiversity, web, carbon, air_quality, weather_hydrology, geospatial };

/// Prompt/section order.
inline constexpr std::array<Category, 7> kCategoryOrder{
    Category::remote_sensing, Category::biodiversity, Category::web,         Category::carbon,
    Category::air_quality,    Category::weather_hydrology, Category::geospatial,
};

std::string_view to_string(Category c);
std::string_view category_title(Category c);
std::optional<Category> parse_category(std::string_view text);

enum class ParamType { real, integer, string, date, geopoint, image_ref, audio_ref, series_ref };

std::string_view to_string(ParamType t);
std::optional<ParamType> parse_param_type(std::string_view text);

/// Shape of an executor's payload; checked on every ok observation.
enum class ReturnKind {
    geopoint,
    record,
    series,
    analysis,
    image,
    index_map,
    change_report,
    quantity,
    search_results,
    text,
    candidates,
};

std::string_view to_string(ReturnKind k);

struct ParamSpec {
    std::string name;
    ParamType type = ParamType::string;
    bool required = true;
    std::optional<double> min;  // inclusive numeric bounds for real/integer
    std::optional<double> max;
};

struct ToolSignature {
    std::string name;
    Category category = Category::geospatial;
    std::vector<ParamSpec> params;
    ReturnKind returns = ReturnKind::record;
    std::string description;

    const ParamSpec* param(std::string_view param_name) const;
    std::vector<std::string> required_params() const;
    /// Throws InvalidArgument on a bad identifier or duplicate param name.
    void validate() const;
};

bool is_identifier(std::string_view s);

}  // namespace climagent::toolkit
