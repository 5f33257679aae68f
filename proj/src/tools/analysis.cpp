#include "climagent/tools/analysis.hpp"

#include <cmath>

#include "climagent/core/error.hpp"

namespace climagent::tools {

using nlohmann::json;

json AnalysisReport::to_json() const {
    auto points = [](const std::vector<FlaggedPoint>& v, bool with_z) {
        json arr = json::array();
        for (const auto& p : v) {
            json e{{"time", core::format_iso(p.time)}, {"value", p.value}};
            if (with_z) e["z"] = p.z;
            arr.push_back(std::move(e));
        }
        return arr;
    };
    json series_points = json::array();
    for (const auto& r : series.records())
        series_points.push_back({{"time", core::format_iso(r.timestamp)}, {"value", r.value ? json(*r.value) : json()}});
    json j{{"variable", variable},
           {"unit", unit},
           {"start", core::format_iso(start)},
           {"end", core::format_iso(end)},
           {"stats", {{"n", stats.n}, {"min", stats.min}, {"max", stats.max}, {"mean", stats.mean}, {"std", stats.std}}},
           {"trend", {{"slope_per_day", slope_per_day}, {"label", trend_label}}},
           {"anomalies", points(anomalies, true)},
           {"series", {{"points", series_points}}}};
    if (flags == RangeFlags::exceedances) j["exceedances"] = points(flagged, false);
    if (flags == RangeFlags::events) j["events"] = points(flagged, false);
    if (threshold) j["threshold"] = *threshold;
    return j;
}

AnalysisReport analyze_series(const core::CanonicalSeries& series, RangeFlags flags, const AnalysisConfig& config) {
    std::vector<const core::CanonicalRecord*> valid;
    for (const auto& r : series.records())
        if (r.value) valid.push_back(&r);
    if (valid.empty()) throw Error(ErrorCode::EmptyRange, "no observations in the requested range");

    AnalysisReport rep;
    rep.variable = series.variable();
    rep.unit = series.unit();
    rep.start = series.records().front().timestamp;
    rep.end = series.records().back().timestamp;
    rep.flags = flags;
    rep.series = series;

    std::vector<double> xs, ys;
    const auto t0 = valid.front()->timestamp;
    for (const auto* r : valid) {
        xs.push_back(static_cast<double>((r->timestamp - t0).count()) / 86400.0);
        ys.push_back(*r->value);
    }
    rep.stats = core::summarize(ys);
    rep.slope_per_day = core::least_squares_slope(xs, ys);
    rep.trend_label = rep.slope_per_day > 0.0 ? "increasing" : rep.slope_per_day < 0.0 ? "decreasing" : "flat";

    if (rep.stats.std > 0.0) {
        for (const auto* r : valid) {
            double z = (*r->value - rep.stats.mean) / rep.stats.std;
            if (std::fabs(z) > config.anomaly_z) rep.anomalies.push_back({r->timestamp, *r->value, z});
        }
    }
    if (flags != RangeFlags::none) {
        rep.threshold = flags == RangeFlags::exceedances ? config.aqi_threshold : config.heavy_rain_mm;
        for (const auto* r : valid)
            if (*r->value > *rep.threshold) rep.flagged.push_back({r->timestamp, *r->value, 0.0});
    }
    return rep;
}

}  // namespace climagent::tools
