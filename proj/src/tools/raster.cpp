#include "climagent/tools/raster.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "climagent/core/csv.hpp"
#include "climagent/core/error.hpp"

namespace climagent::tools {

using nlohmann::json;

void RasterImage::validate() const {
    if (width == 0 || height == 0) throw Error(ErrorCode::InvalidArgument, "raster has zero size");
    for (const auto& [name, data] : bands) {
        if (data.size() != width * height)
            throw Error(ErrorCode::ShapeMismatch, "band " + name + " does not match raster dimensions");
        for (double v : data)
            if (!(v >= 0.0 && v <= 1.0))
                throw Error(ErrorCode::InvalidArgument, "band " + name + " has reflectance outside [0, 1]");
    }
}

const std::vector<double>& RasterImage::band(const std::string& name) const {
    auto it = bands.find(name);
    if (it == bands.end()) throw Error(ErrorCode::MissingBand, "image " + id + " has no " + name + " band");
    return it->second;
}

RasterImage parse_raster(std::istream& in, std::string id) {
    RasterImage img;
    img.id = std::move(id);
    std::string line;
    std::size_t lineno = 0;
    auto bad = [&](const std::string& what) {
        throw Error(ErrorCode::ParseError, "raster line " + std::to_string(lineno) + ": " + what);
    };
    auto next = [&]() -> bool {
        while (std::getline(in, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (!line.empty() && line[0] != '#') return true;
        }
        return false;
    };
    if (!next() || line != "raster v1") bad("expected 'raster v1'");
    std::optional<double> lat, lon;
    bool have_line = next();
    while (have_line) {
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "band") {
            std::string name;
            ls >> name;
            if (name.empty()) bad("band needs a name");
            if (img.width == 0 || img.height == 0) bad("band before width/height");
            std::vector<double> data;
            data.reserve(img.width * img.height);
            for (std::size_t r = 0; r < img.height; ++r) {
                if (!next()) bad("truncated band " + name);
                std::istringstream row(line);
                std::string tok;
                std::size_t cols = 0;
                while (row >> tok) {
                    data.push_back(core::parse_double(tok));
                    ++cols;
                }
                if (cols != img.width) bad("band row has " + std::to_string(cols) + " values");
            }
            if (!img.bands.emplace(name, std::move(data)).second) bad("duplicate band " + name);
        } else {
            std::string value;
            ls >> value;
            if (key == "width") img.width = std::stoul(value);
            else if (key == "height") img.height = std::stoul(value);
            else if (key == "pixel_size_m") img.pixel_size_m = core::parse_double(value);
            else if (key == "acquired") img.acquired = core::normalize_timestamp(value);
            else if (key == "lat") lat = core::parse_double(value);
            else if (key == "lon") lon = core::parse_double(value);
            else bad("unknown key " + key);
        }
        have_line = next();
    }
    if (!lat || !lon) bad("raster needs lat and lon");
    img.location = core::GeoPoint(*lat, *lon);
    img.validate();
    return img;
}

RasterImage load_raster(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::NoImagery, "cannot open raster " + path.string());
    return parse_raster(in, path.stem().string());
}

IndexStats index_stats(const std::vector<std::optional<double>>& values) {
    IndexStats s;
    std::size_t n = 0;
    double sum = 0.0;
    for (const auto& v : values) {
        if (!v) continue;
        if (n == 0) s.min = s.max = *v;
        s.min = std::min(s.min, *v);
        s.max = std::max(s.max, *v);
        sum += *v;
        ++n;
    }
    if (n > 0) s.mean = sum / static_cast<double>(n);
    s.valid_fraction = values.empty() ? 0.0 : static_cast<double>(n) / static_cast<double>(values.size());
    return s;
}

namespace {

json optional_array(const std::vector<std::optional<double>>& values) {
    json arr = json::array();
    for (const auto& v : values) arr.push_back(v ? json(*v) : json(nullptr));
    return arr;
}

}  // namespace

json IndexMap::to_json() const {
    return {{"index", index_name},
            {"width", width},
            {"height", height},
            {"values", optional_array(values)},
            {"stats",
             {{"min", stats.min}, {"max", stats.max}, {"mean", stats.mean}, {"valid_fraction", stats.valid_fraction}}}};
}

IndexMap normalized_difference(const std::string& index_name, const std::vector<double>& a,
                               const std::vector<double>& b, std::size_t width, std::size_t height) {
    if (a.size() != width * height || b.size() != width * height)
        throw Error(ErrorCode::ShapeMismatch, "bands do not match raster dimensions");
    IndexMap m;
    m.index_name = index_name;
    m.width = width;
    m.height = height;
    m.values.reserve(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double den = a[k] + b[k];
        if (den == 0.0 || !std::isfinite(den)) {
            m.values.push_back(std::nullopt);
            continue;
        }
        // Clamp guards rounding at the +-1 extremes.
        m.values.push_back(std::clamp((a[k] - b[k]) / den, -1.0, 1.0));
    }
    m.stats = index_stats(m.values);
    return m;
}

IndexMap calculate_ndvi(const RasterImage& image) {
    return normalized_difference("ndvi", image.band("nir"), image.band("red"), image.width, image.height);
}

IndexMap calculate_ndwi(const RasterImage& image) {
    return normalized_difference("ndwi", image.band("green"), image.band("nir"), image.width, image.height);
}

json ChangeReport::to_json() const {
    return {{"width", width},
            {"height", height},
            {"delta_map", optional_array(delta_map)},
            {"mean_ndvi_delta", mean_ndvi_delta},
            {"degraded_area_fraction", degraded_area_fraction},
            {"threshold", threshold},
            {"valid_pixels", valid_pixels}};
}

ChangeReport desertification_analysis(const RasterImage& before, const RasterImage& after, double threshold) {
    if (before.width != after.width || before.height != after.height)
        throw Error(ErrorCode::ShapeMismatch, "images differ in dimensions");
    if (!(before.location == after.location))
        throw Error(ErrorCode::ShapeMismatch, "images cover different locations");
    auto n0 = calculate_ndvi(before);
    auto n1 = calculate_ndvi(after);
    ChangeReport r;
    r.width = before.width;
    r.height = before.height;
    r.threshold = threshold;
    r.delta_map.reserve(n0.values.size());
    double sum = 0.0;
    std::size_t degraded = 0;
    for (std::size_t k = 0; k < n0.values.size(); ++k) {
        if (!n0.values[k] || !n1.values[k]) {
            r.delta_map.push_back(std::nullopt);
            continue;
        }
        double d = *n1.values[k] - *n0.values[k];
        r.delta_map.push_back(d);
        sum += d;
        ++r.valid_pixels;
        if (d < threshold) ++degraded;
    }
    if (r.valid_pixels > 0) {
        r.mean_ndvi_delta = sum / static_cast<double>(r.valid_pixels);
        r.degraded_area_fraction = static_cast<double>(degraded) / static_cast<double>(r.valid_pixels);
    }
    return r;
}

}  // namespace climagent::tools
