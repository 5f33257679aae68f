#pragma once

#include <cstddef>
#include <span>

namespace climagent::core {

/// Population statistics (ddof = 0).
struct SummaryStats {
    std::size_t n = 0;
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;
    double std = 0.0;
};

SummaryStats summarize(std::span<const double> values);

/// Ordinary least-squares slope of ys against xs. Zero when xs has no spread.
double least_squares_slope(std::span<const double> xs, std::span<const double> ys);

}  // namespace climagent::core
