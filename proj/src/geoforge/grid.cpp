#include "climagent/geoforge/grid.hpp"

#include <cmath>
#include <limits>
#include <tuple>

#include "climagent/core/error.hpp"
#include "climagent/core/geo.hpp"

namespace climagent::geoforge {

std::string_view to_string(DistanceMetric m) {
    return m == DistanceMetric::spherical ? "spherical" : "equirectangular";
}

std::optional<DistanceMetric> parse_metric(std::string_view s) {
    if (s == "spherical" || s == "haversine") return DistanceMetric::spherical;
    if (s == "equirectangular") return DistanceMetric::equirectangular;
    return std::nullopt;
}

double distance_km(const core::GeoPoint& a, const core::GeoPoint& b, DistanceMetric metric) {
    return metric == DistanceMetric::spherical ? core::haversine_km(a, b) : core::equirectangular_km(a, b);
}

GridCell nearest_grid_cell(const core::GeoPoint& p, const core::GridSpec& grid, DistanceMetric metric) {
    const auto& lats = grid.lats();
    const auto& lons = grid.lons();
    if (lats.empty() || lons.empty()) throw Error(ErrorCode::EmptyGrid, "grid has an empty axis");

    // For a fixed latitude row both metrics grow with |dlon|, so only the
    // columns closest in longitude can hold the minimum. Near-equal columns
    // are all kept so exact ties still resolve by index.
    double best_dlon = std::numeric_limits<double>::infinity();
    for (double lon : lons) best_dlon = std::min(best_dlon, std::fabs(core::wrap_lon_delta(lon - p.lon())));
    std::vector<std::size_t> cols;
    for (std::size_t j = 0; j < lons.size(); ++j)
        if (std::fabs(core::wrap_lon_delta(lons[j] - p.lon())) <= best_dlon + 1e-9) cols.push_back(j);

    GridCell best;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < lats.size(); ++i) {
        for (std::size_t j : cols) {
            double d = distance_km(p, core::GeoPoint(lats[i], lons[j]), metric);
            if (d < best_d) {
                best_d = d;
                best = {i, j};
            }
        }
    }
    return best;
}

GridCell nearest_masked_cell(const core::GeoPoint& p, const core::GridSpec& grid, const std::vector<bool>& mask,
                             DistanceMetric metric) {
    const auto& lats = grid.lats();
    const auto& lons = grid.lons();
    if (lats.empty() || lons.empty()) throw Error(ErrorCode::EmptyGrid, "grid has an empty axis");
    if (mask.size() != grid.size()) throw Error(ErrorCode::DimensionMismatch, "mask size differs from grid");
    GridCell best;
    double best_d = std::numeric_limits<double>::infinity();
    bool any = false;
    for (std::size_t i = 0; i < lats.size(); ++i) {
        for (std::size_t j = 0; j < lons.size(); ++j) {
            if (!mask[i * lons.size() + j]) continue;
            any = true;
            double d = distance_km(p, core::GeoPoint(lats[i], lons[j]), metric);
            if (d < best_d) {
                best_d = d;
                best = {i, j};
            }
        }
    }
    if (!any) throw Error(ErrorCode::EmptyGrid, "mask selects no grid cell");
    return best;
}

}  // namespace climagent::geoforge
