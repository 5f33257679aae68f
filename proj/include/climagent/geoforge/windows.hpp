#pragma once

#include <chrono>
#include <cstddef>
#include <vector>

#include "climagent/core/types.hpp"

namespace climagent::geoforge {

struct WindowSpec {
    std::size_t index = 0;  // t
    int delta_days = 90;
    core::Instant start;    // anchor + t * delta
    core::Instant end;      // exclusive
    std::size_t expected = 0;
    std::size_t observed = 0;
    double completeness = 0.0;

    friend bool operator==(const WindowSpec&, const WindowSpec&) = default;
};

/// Most frequent gap between consecutive records; the smallest gap wins a
/// tie. Throws InvalidArgument on fewer than two records.
std::chrono::seconds modal_cadence(const core::CanonicalSeries& series);

/// Start of the trailing span: the first record at or after
/// (last timestamp + cadence) minus `years` calendar years.
core::Instant window_anchor(const core::CanonicalSeries& series, int years = 10);

/// Non-overlapping windows [anchor + t*delta, anchor + (t+1)*delta) that fit
/// entirely before (last timestamp + cadence). Windows whose completeness is
/// below rho are dropped; kept windows keep their original index t.
std::vector<WindowSpec> segment_windows(const core::CanonicalSeries& series, int delta_days = 90,
                                        double rho = 0.8, int years = 10);

}  // namespace climagent::geoforge
