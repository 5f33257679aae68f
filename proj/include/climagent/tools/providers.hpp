#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "climagent/core/types.hpp"
#include "climagent/geoforge/cities.hpp"
#include "climagent/geoforge/gridded.hpp"
#include "climagent/tools/carbon.hpp"
#include "climagent/tools/raster.hpp"

namespace climagent::tools {

/// One daily value in source units; executors normalize.
struct RawSample {
    core::Date date;
    std::string variable;
    std::optional<double> value;
    std::string unit;
};

struct SiteReading {
    core::GeoPoint site{0.0, 0.0};
    std::string site_name;
    std::vector<RawSample> samples;  // date order, then provider variable order
};

/// Daily observation/forecast source. Datasets: weather, rain, aqi, uv,
/// pollen, discharge.
class ObservationProvider {
public:
    virtual ~ObservationProvider() = default;
    /// Samples for dates in [from, to]. Throws NoDataForDate when nothing
    /// covers the range, ProviderFailure when the point is not served.
    virtual SiteReading history(std::string_view dataset, const core::GeoPoint& p, core::Date from,
                                core::Date to) const = 0;
    /// Exactly `horizon` days starting the day after today(). Throws
    /// HorizonTooLong above max_horizon(dataset).
    virtual SiteReading forecast(std::string_view dataset, const core::GeoPoint& p, int horizon) const = 0;
    virtual int max_horizon(std::string_view dataset) const = 0;
    virtual core::Date today() const = 0;
    virtual std::string describe() const = 0;
};

struct GeocodeResult {
    core::GeoPoint point{0.0, 0.0};
    std::string name;
    std::string country;
    double similarity = 1.0;
};

class GeocodeProvider {
public:
    virtual ~GeocodeProvider() = default;
    virtual GeocodeResult geocode(std::string_view region) const = 0;  // UnknownRegion
};

class ImageryProvider {
public:
    virtual ~ImageryProvider() = default;
    virtual RasterImage retrieve(const core::GeoPoint& p, core::Date date) const = 0;  // NoImagery
    /// Image for an "img:<id>" reference. Throws UnresolvableReference.
    virtual RasterImage resolve(std::string_view ref) const = 0;
};

struct SearchResult {
    std::string title;
    std::string url;
    std::string snippet;
};

class SearchProvider {
public:
    virtual ~SearchProvider() = default;
    virtual std::vector<SearchResult> search(std::string_view query, std::size_t k) const = 0;
};

struct SpeciesCandidate {
    std::string species;
    double confidence = 0.0;
};

class SpeciesProvider {
public:
    virtual ~SpeciesProvider() = default;
    /// Candidates sorted by descending confidence. Throws UnresolvableReference.
    virtual std::vector<SpeciesCandidate> detect(std::string_view ref) const = 0;
};

struct FetchedPage {
    std::string url;
    std::string body;
    std::string kind;  // html | pdf_text
};

class PageFetcher {
public:
    virtual ~PageFetcher() = default;
    virtual FetchedPage fetch(std::string_view url) const = 0;  // ProviderFailure
};

/// Lowercased, whitespace-collapsed query text.
std::string normalize_query(std::string_view query);
/// 64-bit FNV-1a of the normalized query, as 16 hex digits.
std::string query_key(std::string_view query);

struct ProviderSet {
    std::shared_ptr<const ObservationProvider> observations;
    std::shared_ptr<const GeocodeProvider> geocoder;
    std::shared_ptr<const ImageryProvider> imagery;
    std::shared_ptr<const SearchProvider> search;
    std::shared_ptr<const SpeciesProvider> birds;
    std::shared_ptr<const SpeciesProvider> species;
    std::shared_ptr<const PageFetcher> pages;
    std::shared_ptr<const EmissionFactorTable> factors;
    std::string mode;  // fixture | live
};

// ---- fixture implementations -------------------------------------------

class InventoryGeocoder final : public GeocodeProvider {
public:
    explicit InventoryGeocoder(geoforge::CityInventory inventory) : inventory_(std::move(inventory)) {}
    GeocodeResult geocode(std::string_view region) const override;
    const geoforge::CityInventory& inventory() const noexcept { return inventory_; }

private:
    geoforge::CityInventory inventory_;
};

/// Rows `lat,lon,date,variable,value,unit` (empty value = missing) per
/// dataset, or a gridded product for discharge. Points resolve to the
/// nearest fixture site within `site_radius_km`.
class FixtureObservationProvider final : public ObservationProvider {
public:
    struct CsvDataset {
        std::map<std::pair<double, double>, std::vector<RawSample>> sites;
        int max_horizon = 7;
    };
    struct GridDataset {
        std::shared_ptr<const geoforge::GriddedProduct> product;
        std::string variable;
        int max_horizon = 7;
    };

    FixtureObservationProvider(core::Date today, double site_radius_km = 25.0)
        : today_(today), radius_km_(site_radius_km) {}

    static CsvDataset load_csv(const std::filesystem::path& path, int max_horizon);

    void add_csv(std::string dataset, CsvDataset data) { csv_[std::move(dataset)] = std::move(data); }
    void add_grid(std::string dataset, GridDataset data) { grid_[std::move(dataset)] = std::move(data); }

    SiteReading history(std::string_view dataset, const core::GeoPoint& p, core::Date from,
                        core::Date to) const override;
    SiteReading forecast(std::string_view dataset, const core::GeoPoint& p, int horizon) const override;
    int max_horizon(std::string_view dataset) const override;
    core::Date today() const override { return today_; }
    std::string describe() const override { return "fixture"; }

private:
    SiteReading slice(std::string_view dataset, const core::GeoPoint& p, core::Date from, core::Date to) const;

    core::Date today_;
    double radius_km_;
    std::map<std::string, CsvDataset, std::less<>> csv_;
    std::map<std::string, GridDataset, std::less<>> grid_;
};

/// Index rows `lat,lon,date,image_id`; images live in `<dir>/<image_id>.raster`.
class FixtureImageryProvider final : public ImageryProvider {
public:
    FixtureImageryProvider(const std::filesystem::path& index_csv, const std::filesystem::path& image_dir,
                           double site_radius_km = 25.0);
    RasterImage retrieve(const core::GeoPoint& p, core::Date date) const override;
    RasterImage resolve(std::string_view ref) const override;

private:
    struct Entry {
        core::GeoPoint point;
        core::Date date;
        std::string image_id;
    };
    std::vector<Entry> index_;
    std::map<std::string, RasterImage, std::less<>> images_;
    double radius_km_;
};

/// JSON lines `{"query": ..., "results": [{"title","url","snippet"}]}`
/// keyed by query_key(query).
class FixtureSearchProvider final : public SearchProvider {
public:
    explicit FixtureSearchProvider(const std::filesystem::path& jsonl);
    std::vector<SearchResult> search(std::string_view query, std::size_t k) const override;

private:
    std::map<std::string, std::vector<SearchResult>, std::less<>> by_key_;
};

/// Rows `ref,species,confidence`.
class FixtureSpeciesProvider final : public SpeciesProvider {
public:
    explicit FixtureSpeciesProvider(const std::filesystem::path& csv);
    std::vector<SpeciesCandidate> detect(std::string_view ref) const override;

private:
    std::map<std::string, std::vector<SpeciesCandidate>, std::less<>> by_ref_;
};

/// `<dir>/index.csv` rows `url,file,kind`.
class FixturePageFetcher final : public PageFetcher {
public:
    explicit FixturePageFetcher(const std::filesystem::path& dir);
    FetchedPage fetch(std::string_view url) const override;

private:
    std::map<std::string, FetchedPage, std::less<>> pages_;
};

/// Reads `<root>/fixture.json` and wires every fixture provider. Paths in
/// the descriptor are relative to the root.
ProviderSet load_fixture_providers(const std::filesystem::path& root);

// ---- live implementations ----------------------------------------------

struct LiveConfig {
    std::string geocoding_url = "https://geocoding-api.open-meteo.com";
    std::string archive_url = "https://archive-api.open-meteo.com";
    std::string forecast_url = "https://api.open-meteo.com";
    std::string air_quality_url = "https://air-quality-api.open-meteo.com";
    std::string flood_url = "https://flood-api.open-meteo.com";
    std::string search_url;  // SearxNG-compatible endpoint; empty = none
    std::chrono::seconds timeout{20};
    std::optional<core::Date> today;  // defaults to the system clock
};

/// Open-Meteo backed observations (archive, forecast, air quality, flood).
class OpenMeteoProvider final : public ObservationProvider {
public:
    explicit OpenMeteoProvider(LiveConfig config) : config_(std::move(config)) {}
    SiteReading history(std::string_view dataset, const core::GeoPoint& p, core::Date from,
                        core::Date to) const override;
    SiteReading forecast(std::string_view dataset, const core::GeoPoint& p, int horizon) const override;
    int max_horizon(std::string_view dataset) const override;
    core::Date today() const override;
    std::string describe() const override { return "open-meteo"; }

private:
    SiteReading query(std::string_view dataset, const core::GeoPoint& p, core::Date from, core::Date to,
                      bool forecast) const;
    LiveConfig config_;
};

class OpenMeteoGeocoder final : public GeocodeProvider {
public:
    explicit OpenMeteoGeocoder(LiveConfig config) : config_(std::move(config)) {}
    GeocodeResult geocode(std::string_view region) const override;

private:
    LiveConfig config_;
};

class SearxSearchProvider final : public SearchProvider {
public:
    explicit SearxSearchProvider(LiveConfig config) : config_(std::move(config)) {}
    std::vector<SearchResult> search(std::string_view query, std::size_t k) const override;

private:
    LiveConfig config_;
};

class HttpPageFetcher final : public PageFetcher {
public:
    explicit HttpPageFetcher(std::chrono::seconds timeout = std::chrono::seconds(20)) : timeout_(timeout) {}
    FetchedPage fetch(std::string_view url) const override;

private:
    std::chrono::seconds timeout_;
};

/// Live observations, geocoding, search and page fetching. Imagery, species
/// and emission factors have no live source and come from `fallback`
/// (usually a fixture set) when given.
ProviderSet make_live_providers(const LiveConfig& config, const ProviderSet* fallback = nullptr);

}  // namespace climagent::tools
