#include "climagent/core/stats.hpp"

#include <algorithm>
#include <cmath>

#include "climagent/core/error.hpp"

namespace climagent::core {

SummaryStats summarize(std::span<const double> values) {
    SummaryStats s;
    if (values.empty()) return s;
    s.n = values.size();
    s.min = *std::min_element(values.begin(), values.end());
    s.max = *std::max_element(values.begin(), values.end());
    // shifted by the first value so a constant input gives exactly mean = value, std = 0
    const double shift = values.front();
    double sum = 0.0;
    for (double v : values) sum += v - shift;
    const double md = sum / static_cast<double>(s.n);
    double ss = 0.0;
    for (double v : values) ss += (v - shift - md) * (v - shift - md);
    s.mean = shift + md;
    s.std = std::sqrt(ss / static_cast<double>(s.n));
    return s;
}

double least_squares_slope(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw Error(ErrorCode::DimensionMismatch, "slope inputs differ in length");
    if (xs.size() < 2) return 0.0;
    const auto n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    const double shift = ys.front();
    for (std::size_t k = 0; k < xs.size(); ++k) {
        mx += xs[k];
        my += ys[k] - shift;
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        sxy += (xs[k] - mx) * (ys[k] - shift - my);
        sxx += (xs[k] - mx) * (xs[k] - mx);
    }
    return sxx == 0.0 ? 0.0 : sxy / sxx;
}

}  // namespace climagent::core
