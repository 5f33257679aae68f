#include "climagent/core/geo.hpp"

#include <cmath>
#include <numbers>

namespace climagent::core {

namespace {
constexpr double kDegToRad = std::numbers::pi / 180.0;
}

double wrap_lon_delta(double dlon_deg) {
    double d = std::remainder(dlon_deg, 360.0);
    return d;
}

double haversine_km(const GeoPoint& a, const GeoPoint& b) {
    const double phi1 = a.lat() * kDegToRad;
    const double phi2 = b.lat() * kDegToRad;
    const double dphi = (b.lat() - a.lat()) * kDegToRad;
    const double dlambda = wrap_lon_delta(b.lon() - a.lon()) * kDegToRad;
    const double s1 = std::sin(dphi / 2.0);
    const double s2 = std::sin(dlambda / 2.0);
    double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
    h = std::min(1.0, std::max(0.0, h));
    return 2.0 * kEarthRadiusKm * std::asin(std::sqrt(h));
}

double equirectangular_km(const GeoPoint& a, const GeoPoint& b) {
    const double mid = 0.5 * (a.lat() + b.lat()) * kDegToRad;
    const double dphi = (b.lat() - a.lat()) * kDegToRad;
    const double dlambda = wrap_lon_delta(b.lon() - a.lon()) * kDegToRad * std::cos(mid);
    return kEarthRadiusKm * std::sqrt(dphi * dphi + dlambda * dlambda);
}

}  // namespace climagent::core
