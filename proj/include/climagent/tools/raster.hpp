#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "climagent/core/types.hpp"

namespace climagent::tools {

/// Multispectral reflectance image; bands are row-major height x width.
struct RasterImage {
    std::string id;
    std::size_t width = 0;
    std::size_t height = 0;
    double pixel_size_m = 10.0;
    core::Instant acquired{};
    core::GeoPoint location{0.0, 0.0};
    std::map<std::string, std::vector<double>> bands;

    /// Throws ShapeMismatch / InvalidArgument when a band has the wrong size
    /// or a reflectance outside [0, 1].
    void validate() const;
    const std::vector<double>& band(const std::string& name) const;  // MissingBand
};

/// Text raster format:
///
///   raster v1
///   width <n>
///   height <n>
///   pixel_size_m <m>
///   acquired <ISO-8601>
///   lat <deg>
///   lon <deg>
///   band <name>
///   <height rows of width values>
///   band ...
RasterImage parse_raster(std::istream& in, std::string id = {});
RasterImage load_raster(const std::filesystem::path& path);

struct IndexStats {
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;
    double valid_fraction = 0.0;
};

struct IndexMap {
    std::string index_name;  // ndvi | ndwi
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<std::optional<double>> values;  // nullopt = invalid pixel
    IndexStats stats;

    nlohmann::json to_json() const;
};

/// (a - b) / (a + b) per pixel; zero denominators are invalid pixels.
IndexMap normalized_difference(const std::string& index_name, const std::vector<double>& a,
                               const std::vector<double>& b, std::size_t width, std::size_t height);

IndexMap calculate_ndvi(const RasterImage& image);  // (nir - red) / (nir + red)
IndexMap calculate_ndwi(const RasterImage& image);  // (green - nir) / (green + nir)

IndexStats index_stats(const std::vector<std::optional<double>>& values);

struct ChangeReport {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<std::optional<double>> delta_map;  // ndvi(after) - ndvi(before)
    double mean_ndvi_delta = 0.0;
    double degraded_area_fraction = 0.0;
    double threshold = -0.1;
    std::size_t valid_pixels = 0;

    nlohmann::json to_json() const;
};

inline constexpr double kDefaultDegradationThreshold = -0.1;

/// Throws ShapeMismatch when the images differ in dimensions or location.
ChangeReport desertification_analysis(const RasterImage& before, const RasterImage& after,
                                      double threshold = kDefaultDegradationThreshold);

}  // namespace climagent::tools
