#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "climagent/core/types.hpp"

namespace climagent::geoforge {

struct CityEntry {
    std::string name;
    std::string country;
    core::GeoPoint location;
};

struct BoundingBox {
    double lat_min = 12.0;
    double lat_max = 33.0;
    double lon_min = 34.0;
    double lon_max = 60.0;

    bool contains(const core::GeoPoint& p) const;
};

struct CityMatch {
    const CityEntry* entry = nullptr;
    double similarity = 0.0;  // 1.0 for an exact normalized match
};

/// Lowercase, trim, collapse whitespace, drop punctuation other than '-'.
std::string normalize_place_name(std::string_view name);

/// 1 - levenshtein(a, b) / max(|a|, |b|) on normalized names.
double name_similarity(std::string_view a, std::string_view b);

class CityInventory {
public:
    static constexpr double kDefaultSimilarityFloor = 0.8;

    CityInventory(std::vector<CityEntry> entries, BoundingBox box = {});

    /// CSV with header `city,country,lat,lon`.
    static CityInventory parse(std::istream& in, BoundingBox box = {});
    static CityInventory load_file(const std::filesystem::path& path, BoundingBox box = {});

    /// Best match above the floor. "City, Country" restricts the search to
    /// that country. Throws UnknownRegion when nothing qualifies.
    CityMatch resolve(std::string_view query, double floor = kDefaultSimilarityFloor) const;

    const CityEntry* find_exact(std::string_view name, std::string_view country = {}) const;
    const std::vector<CityEntry>& entries() const noexcept { return entries_; }
    const BoundingBox& box() const noexcept { return box_; }

private:
    std::vector<CityEntry> entries_;
    BoundingBox box_;
};

inline const std::vector<std::string>& gulf_countries() {
    static const std::vector<std::string> k{"Bahrain", "Kuwait", "Oman", "Qatar", "Saudi Arabia", "UAE"};
    return k;
}

}  // namespace climagent::geoforge
