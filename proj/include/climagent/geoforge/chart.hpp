#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "climagent/core/stats.hpp"
#include "climagent/core/types.hpp"
#include "climagent/geoforge/windows.hpp"

namespace climagent::geoforge {

struct ChartMetadata {
    std::string city;
    std::string variable;
    std::string unit;
    std::string start;  // ISO, inclusive
    std::string end;    // ISO, exclusive
    core::SummaryStats stats;
    double slope_per_day = 0.0;

    nlohmann::json to_json() const;
};

/// A rendered window chart plus the canonical CSV slice it was drawn from.
struct ChartArtifact {
    std::string id;
    ChartMetadata metadata;
    WindowSpec window;
    core::CanonicalSeries data;  // data_ref contents
    std::string svg;
    core::Provenance provenance;

    std::string data_csv() const;
    std::string svg_filename() const { return id + ".svg"; }
    std::string csv_filename() const { return id + ".csv"; }
};

inline constexpr int kChartWidth = 800;
inline constexpr int kChartHeight = 400;

/// Stats and least-squares slope (value per day) over non-missing records.
ChartMetadata describe_series(const core::CanonicalSeries& slice, std::string city, core::Instant start,
                              core::Instant end);

/// Fixed-canvas SVG line chart; missing records break the line. Pure.
std::string render_line_chart(const core::CanonicalSeries& slice, core::Instant start, core::Instant end,
                              std::string_view title, std::string_view y_label);

/// Throws EmptySlice when the slice has no value inside the window.
ChartArtifact build_chart(const core::CanonicalSeries& series, const WindowSpec& window, const std::string& city,
                          const std::string& variable);

/// Header of the per-window metadata CSV written next to the charts.
inline constexpr std::string_view kChartMetadataHeader =
    "chart_id,city,variable,unit,start,end,n,min,max,mean,std,slope_per_day,completeness,data_ref,chart";

std::string chart_metadata_row(const ChartArtifact& artifact);

/// Writes <id>.svg and <id>.csv under `dir`.
void write_chart_files(const ChartArtifact& artifact, const std::filesystem::path& dir);

std::string slugify(std::string_view text);

}  // namespace climagent::geoforge
