#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "climagent/core/stats.hpp"
#include "climagent/core/types.hpp"

namespace climagent::tools {

struct AnalysisConfig {
    double anomaly_z = 3.0;
    double aqi_threshold = 100.0;
    double heavy_rain_mm = 10.0;
};

/// Extra flagging on top of stats/trend/anomalies.
enum class RangeFlags { none, exceedances, events };

struct FlaggedPoint {
    core::Instant time;
    double value = 0.0;
    double z = 0.0;  // z-score against the range (anomalies only)
};

struct AnalysisReport {
    std::string variable;
    std::string unit;
    core::Instant start;
    core::Instant end;
    core::SummaryStats stats;
    double slope_per_day = 0.0;
    std::string trend_label;  // increasing | decreasing | flat
    std::vector<FlaggedPoint> anomalies;
    RangeFlags flags = RangeFlags::none;
    std::optional<double> threshold;
    std::vector<FlaggedPoint> flagged;  // exceedances or events
    core::CanonicalSeries series;

    nlohmann::json to_json() const;
};

/// Stats over valid points, least-squares slope against days since the
/// first valid point, |z| > anomaly_z anomalies against the range mean and
/// population std (none when std is 0), and optional threshold flags
/// (strictly above). Throws EmptyRange when no valid point exists.
AnalysisReport analyze_series(const core::CanonicalSeries& series, RangeFlags flags = RangeFlags::none,
                              const AnalysisConfig& config = {});

}  // namespace climagent::tools
