#include "climagent/geoforge/windows.hpp"

#include <algorithm>
#include <map>

#include "climagent/core/error.hpp"

namespace climagent::geoforge {

std::chrono::seconds modal_cadence(const core::CanonicalSeries& series) {
    if (series.size() < 2) throw Error(ErrorCode::InvalidArgument, "cadence needs at least two records");
    std::map<std::chrono::seconds, std::size_t> counts;
    for (std::size_t k = 1; k < series.size(); ++k)
        ++counts[std::chrono::duration_cast<std::chrono::seconds>(series[k].timestamp - series[k - 1].timestamp)];
    auto best = counts.begin();
    for (auto it = counts.begin(); it != counts.end(); ++it)
        if (it->second > best->second) best = it;
    return best->first;
}

core::Instant window_anchor(const core::CanonicalSeries& series, int years) {
    if (series.empty()) throw Error(ErrorCode::InvalidArgument, "empty series");
    auto cadence = series.size() > 1 ? modal_cadence(series) : std::chrono::seconds(86400);
    auto span_end = series.records().back().timestamp + cadence;
    auto span_start = core::add_years(span_end, -years);
    for (const auto& r : series.records())
        if (r.timestamp >= span_start) return r.timestamp;
    return series.records().back().timestamp;
}

std::vector<WindowSpec> segment_windows(const core::CanonicalSeries& series, int delta_days, double rho,
                                        int years) {
    if (series.empty()) throw Error(ErrorCode::InvalidArgument, "segment_windows needs a non-empty series");
    if (!(rho > 0.0 && rho <= 1.0)) throw Error(ErrorCode::InvalidArgument, "rho must lie in (0, 1]");
    if (delta_days <= 0) throw Error(ErrorCode::InvalidArgument, "window length must be positive");
    if (series.size() < 2) return {};

    const auto cadence = modal_cadence(series);
    const auto anchor = window_anchor(series, years);
    const auto span_end = series.records().back().timestamp + cadence;
    const std::chrono::seconds delta = std::chrono::days(delta_days);
    const auto expected = static_cast<std::size_t>(delta / cadence);
    if (expected == 0) return {};

    std::vector<WindowSpec> out;
    const auto& recs = series.records();
    auto cursor = std::lower_bound(recs.begin(), recs.end(), anchor,
                                   [](const core::CanonicalRecord& r, core::Instant t) { return r.timestamp < t; });
    for (std::size_t t = 0;; ++t) {
        WindowSpec w;
        w.index = t;
        w.delta_days = delta_days;
        w.start = anchor + delta * static_cast<long long>(t);
        w.end = w.start + delta;
        if (w.end > span_end) break;
        w.expected = expected;
        for (; cursor != recs.end() && cursor->timestamp < w.end; ++cursor)
            if (cursor->value) ++w.observed;
        w.completeness = std::min(1.0, static_cast<double>(w.observed) / static_cast<double>(expected));
        if (w.completeness >= rho) out.push_back(w);
    }
    return out;
}

}  // namespace climagent::geoforge
