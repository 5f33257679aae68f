#pragma once

#include <optional>
#include <string>
#include <vector>

#include "climagent/core/time.hpp"
#include "climagent/core/units.hpp"

namespace climagent::core {

class GeoPoint {
public:
    GeoPoint(double lat, double lon);

    double lat() const noexcept { return lat_; }
    double lon() const noexcept { return lon_; }

    friend bool operator==(const GeoPoint&, const GeoPoint&) = default;

private:
    double lat_;
    double lon_;
};

/// Rectilinear lat/lon grid of a gridded product.
class GridSpec {
public:
    GridSpec(std::vector<double> lats, std::vector<double> lons, double resolution_deg);

    const std::vector<double>& lats() const noexcept { return lats_; }
    const std::vector<double>& lons() const noexcept { return lons_; }
    double resolution_deg() const noexcept { return resolution_deg_; }
    std::size_t size() const noexcept { return lats_.size() * lons_.size(); }
    GeoPoint node(std::size_t i, std::size_t j) const { return GeoPoint(lats_.at(i), lons_.at(j)); }

    /// Evenly spaced axes covering [lat0, lat1] x [lon0, lon1].
    static GridSpec regular(double lat0, double lat1, double lon0, double lon1, double step);

private:
    std::vector<double> lats_;
    std::vector<double> lons_;
    double resolution_deg_;
};

struct CanonicalRecord {
    Instant timestamp;
    std::string variable;
    std::optional<double> value;  // nullopt = explicitly missing
    std::string unit;
    GeoPoint location{0.0, 0.0};
    std::optional<std::string> city;
    std::string source;

    friend bool operator==(const CanonicalRecord&, const CanonicalRecord&) = default;
};

/// Time-ordered records for one (variable, unit, location).
class CanonicalSeries {
public:
    CanonicalSeries() = default;
    explicit CanonicalSeries(std::vector<CanonicalRecord> records,
                             const UnitTable& units = UnitTable::builtin());

    const std::vector<CanonicalRecord>& records() const noexcept { return records_; }
    bool empty() const noexcept { return records_.empty(); }
    std::size_t size() const noexcept { return records_.size(); }
    const CanonicalRecord& operator[](std::size_t i) const { return records_[i]; }

    const std::string& variable() const;
    const std::string& unit() const;

    /// Records with timestamp in [from, to).
    CanonicalSeries slice(Instant from, Instant to) const;
    /// Non-missing values in order.
    std::vector<double> values() const;

    friend bool operator==(const CanonicalSeries&, const CanonicalSeries&) = default;

private:
    std::vector<CanonicalRecord> records_;
};

struct Provenance {
    std::optional<std::string> url;
    std::optional<std::string> title;
    std::optional<std::string> organization;
    std::optional<std::string> published;  // YYYY-MM-DD when known
    std::string query;
    Instant retrieved_at;
    /// Queries issued by the retrieval loop, in order (query -> click -> extract trace).
    std::vector<std::string> trace;

    /// Throws InvalidArgument unless url or title is present.
    void validate() const;

    friend bool operator==(const Provenance&, const Provenance&) = default;
};

}  // namespace climagent::core
