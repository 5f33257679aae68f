#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "climagent/core/types.hpp"

namespace climagent::geoforge {

enum class DistanceMetric { spherical, equirectangular };

std::string_view to_string(DistanceMetric m);
std::optional<DistanceMetric> parse_metric(std::string_view s);

double distance_km(const core::GeoPoint& a, const core::GeoPoint& b, DistanceMetric metric);

struct GridCell {
    std::size_t i = 0;  // latitude index
    std::size_t j = 0;  // longitude index
    friend bool operator==(const GridCell&, const GridCell&) = default;
};

/// Nearest grid node; ties go to the lexicographically smallest (i, j).
/// Throws EmptyGrid when either axis is empty.
GridCell nearest_grid_cell(const core::GeoPoint& p, const core::GridSpec& grid,
                           DistanceMetric metric = DistanceMetric::spherical);

/// Same, restricted to cells whose mask entry (row-major, i * nlon + j) is
/// set. Throws EmptyGrid when the mask selects nothing.
GridCell nearest_masked_cell(const core::GeoPoint& p, const core::GridSpec& grid,
                             const std::vector<bool>& mask, DistanceMetric metric = DistanceMetric::spherical);

}  // namespace climagent::geoforge
