#include "climagent/core/types.hpp"

#include <algorithm>
#include <cmath>

#include "climagent/core/error.hpp"

namespace climagent::core {

GeoPoint::GeoPoint(double lat, double lon) : lat_(lat), lon_(lon) {
    if (!std::isfinite(lat) || !std::isfinite(lon))
        throw Error(ErrorCode::InvalidArgument, "coordinates must be finite");
    if (lat < -90.0 || lat > 90.0) throw Error(ErrorCode::InvalidArgument, "latitude out of [-90, 90]");
    if (lon < -180.0 || lon > 180.0) throw Error(ErrorCode::InvalidArgument, "longitude out of [-180, 180]");
}

namespace {

void check_axis(const std::vector<double>& axis, const char* name) {
    if (axis.empty()) throw Error(ErrorCode::EmptyGrid, std::string("grid axis '") + name + "' is empty");
    for (std::size_t k = 0; k < axis.size(); ++k) {
        if (!std::isfinite(axis[k])) throw Error(ErrorCode::InvalidArgument, "grid axis value not finite");
        if (k > 0 && !(axis[k] > axis[k - 1]))
            throw Error(ErrorCode::InvalidArgument, std::string("grid axis '") + name + "' not strictly increasing");
    }
}

}  // namespace

GridSpec::GridSpec(std::vector<double> lats, std::vector<double> lons, double resolution_deg)
    : lats_(std::move(lats)), lons_(std::move(lons)), resolution_deg_(resolution_deg) {
    check_axis(lats_, "lats");
    check_axis(lons_, "lons");
    if (!(resolution_deg_ > 0.0)) throw Error(ErrorCode::InvalidArgument, "grid resolution must be positive");
    if (lats_.front() < -90.0 || lats_.back() > 90.0 || lons_.front() < -180.0 || lons_.back() > 180.0)
        throw Error(ErrorCode::InvalidArgument, "grid axes outside coordinate range");
}

GridSpec GridSpec::regular(double lat0, double lat1, double lon0, double lon1, double step) {
    if (!(step > 0.0)) throw Error(ErrorCode::InvalidArgument, "grid step must be positive");
    auto axis = [step](double a, double b) {
        std::vector<double> v;
        auto n = static_cast<long>(std::floor((b - a) / step + 1e-9));
        for (long k = 0; k <= n; ++k) v.push_back(a + static_cast<double>(k) * step);
        return v;
    };
    return GridSpec(axis(lat0, lat1), axis(lon0, lon1), step);
}

CanonicalSeries::CanonicalSeries(std::vector<CanonicalRecord> records, const UnitTable& units)
    : records_(std::move(records)) {
    if (records_.empty()) return;
    const auto& first = records_.front();
    if (!units.is_canonical(first.variable, first.unit))
        throw Error(ErrorCode::UnknownUnit,
                    "unit '" + first.unit + "' is not canonical for variable '" + first.variable + "'");
    for (std::size_t k = 0; k < records_.size(); ++k) {
        const auto& r = records_[k];
        if (r.variable != first.variable || r.unit != first.unit || !(r.location == first.location))
            throw Error(ErrorCode::InvalidArgument, "series records must share variable, unit and location");
        if (r.value && !std::isfinite(*r.value))
            throw Error(ErrorCode::InvalidArgument, "series value not finite (use explicit missing)");
        if (k > 0 && !(r.timestamp > records_[k - 1].timestamp))
            throw Error(ErrorCode::InvalidArgument,
                        "series timestamps not strictly increasing at " + format_iso(r.timestamp));
    }
}

const std::string& CanonicalSeries::variable() const {
    if (records_.empty()) throw Error(ErrorCode::InvalidArgument, "empty series has no variable");
    return records_.front().variable;
}

const std::string& CanonicalSeries::unit() const {
    if (records_.empty()) throw Error(ErrorCode::InvalidArgument, "empty series has no unit");
    return records_.front().unit;
}

CanonicalSeries CanonicalSeries::slice(Instant from, Instant to) const {
    CanonicalSeries out;
    for (const auto& r : records_)
        if (r.timestamp >= from && r.timestamp < to) out.records_.push_back(r);
    return out;
}

std::vector<double> CanonicalSeries::values() const {
    std::vector<double> v;
    v.reserve(records_.size());
    for (const auto& r : records_)
        if (r.value) v.push_back(*r.value);
    return v;
}

void Provenance::validate() const {
    if ((!url || url->empty()) && (!title || title->empty()))
        throw Error(ErrorCode::InvalidArgument, "provenance needs a url or a title");
}

}  // namespace climagent::core
