#pragma once

#include "climagent/core/types.hpp"

namespace climagent::core {

inline constexpr double kEarthRadiusKm = 6371.0088;

/// Great-circle distance (haversine).
double haversine_km(const GeoPoint& a, const GeoPoint& b);

/// sqrt(dlat^2 + (cos(mid_lat) * dlon)^2) * R, with mid_lat = (lat_a + lat_b) / 2.
double equirectangular_km(const GeoPoint& a, const GeoPoint& b);

/// Signed longitude difference wrapped into [-180, 180].
double wrap_lon_delta(double dlon_deg);

}  // namespace climagent::core
