#pragma once

#include <chrono>
#include <cmath>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "climagent/core/time.hpp"
#include "climagent/core/types.hpp"
#include "climagent/tools/raster.hpp"

namespace testsupport {

inline std::filesystem::path fixtures() { return CLIMAGENT_FIXTURES; }

// fresh directory under the system temp dir
inline std::filesystem::path scratch(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("climagent_test_" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

inline climagent::core::Instant day(int offset, const char* start = "2013-01-01") {
    return climagent::core::Instant{climagent::core::parse_date(start)} + std::chrono::days{offset};
}

// daily series; nullopt entries become explicit missing records
inline climagent::core::CanonicalSeries daily(const std::vector<std::optional<double>>& values,
                                              const std::string& variable = "temperature",
                                              const std::string& unit = "°C", const char* start = "2013-01-01") {
    std::vector<climagent::core::CanonicalRecord> recs;
    for (std::size_t k = 0; k < values.size(); ++k) {
        climagent::core::CanonicalRecord r;
        r.timestamp = day(static_cast<int>(k), start);
        r.variable = variable;
        r.value = values[k];
        r.unit = unit;
        r.location = climagent::core::GeoPoint(25.0, 51.0);
        r.source = "test";
        recs.push_back(r);
    }
    return climagent::core::CanonicalSeries(std::move(recs));
}

inline climagent::tools::RasterImage raster(std::size_t w, std::size_t h,
                                            std::map<std::string, std::vector<double>> bands,
                                            double lat = 24.2, double lon = 55.7) {
    climagent::tools::RasterImage img;
    img.id = "test";
    img.width = w;
    img.height = h;
    img.location = climagent::core::GeoPoint(lat, lon);
    img.bands = std::move(bands);
    return img;
}

}  // namespace testsupport
