#include <algorithm>
#include <fstream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "climagent/core/csv.hpp"
#include "climagent/core/error.hpp"
#include "climagent/core/geo.hpp"
#include "climagent/tools/providers.hpp"

namespace climagent::tools {

using nlohmann::json;

std::string normalize_query(std::string_view query) {
    std::string out;
    bool space = false;
    for (char c : query) {
        auto u = static_cast<unsigned char>(c);
        if (std::isspace(u)) {
            space = !out.empty();
            continue;
        }
        if (space) out.push_back(' ');
        space = false;
        out.push_back(static_cast<char>(std::tolower(u)));
    }
    return out;
}

std::string query_key(std::string_view query) {
    std::uint64_t h = 14695981039346656037ULL;
    for (char c : normalize_query(query)) h = (h ^ static_cast<unsigned char>(c)) * 1099511628211ULL;
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

std::ifstream open_or_throw(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ConfigError, "cannot open fixture " + path.string());
    return in;
}

std::vector<std::vector<std::string>> read_csv_rows(const std::filesystem::path& path, std::string_view header) {
    auto in = open_or_throw(path);
    std::string line;
    if (!std::getline(in, line) || line.rfind(header, 0) != 0)
        throw Error(ErrorCode::ConfigError, path.string() + " must start with header " + std::string(header));
    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        rows.push_back(core::split_csv_line(line));
    }
    return rows;
}

std::string site_label(const core::GeoPoint& p) {
    return core::format_double(p.lat()) + "," + core::format_double(p.lon());
}

}  // namespace

GeocodeResult InventoryGeocoder::geocode(std::string_view region) const {
    auto m = inventory_.resolve(region);
    return {m.entry->location, m.entry->name, m.entry->country, m.similarity};
}

FixtureObservationProvider::CsvDataset FixtureObservationProvider::load_csv(const std::filesystem::path& path,
                                                                            int max_horizon) {
    CsvDataset d;
    d.max_horizon = max_horizon;
    for (const auto& f : read_csv_rows(path, "lat,lon,date,variable,value,unit")) {
        if (f.size() != 6) throw Error(ErrorCode::ConfigError, "bad fixture row in " + path.string());
        RawSample s{core::parse_date(f[2]), f[3], std::nullopt, f[5]};
        if (!f[4].empty()) s.value = core::parse_double(f[4]);
        d.sites[{core::parse_double(f[0]), core::parse_double(f[1])}].push_back(std::move(s));
    }
    for (auto& [site, samples] : d.sites)
        std::stable_sort(samples.begin(), samples.end(),
                         [](const RawSample& a, const RawSample& b) { return a.date < b.date; });
    return d;
}

int FixtureObservationProvider::max_horizon(std::string_view dataset) const {
    if (auto it = csv_.find(dataset); it != csv_.end()) return it->second.max_horizon;
    if (auto it = grid_.find(dataset); it != grid_.end()) return it->second.max_horizon;
    throw Error(ErrorCode::ProviderFailure, "fixture has no dataset " + std::string(dataset));
}

SiteReading FixtureObservationProvider::slice(std::string_view dataset, const core::GeoPoint& p, core::Date from,
                                              core::Date to) const {
    SiteReading out;
    if (auto it = csv_.find(dataset); it != csv_.end()) {
        const std::vector<RawSample>* best = nullptr;
        double best_d = std::numeric_limits<double>::infinity();
        for (const auto& [key, samples] : it->second.sites) {
            core::GeoPoint site(key.first, key.second);
            double d = core::haversine_km(p, site);
            if (d < best_d) {
                best_d = d;
                best = &samples;
                out.site = site;
            }
        }
        if (!best || best_d > radius_km_)
            throw Error(ErrorCode::ProviderFailure, "no " + std::string(dataset) + " fixture site within " +
                                                        core::format_double(radius_km_) + " km of " + site_label(p));
        out.site_name = site_label(out.site);
        for (const auto& s : *best)
            if (s.date >= from && s.date <= to) out.samples.push_back(s);
        return out;
    }
    if (auto it = grid_.find(dataset); it != grid_.end()) {
        const auto& prod = *it->second.product;
        auto cell = prod.locate(p);
        out.site = prod.grid().node(cell.i, cell.j);
        out.site_name = "cell " + std::to_string(cell.i) + "," + std::to_string(cell.j);
        const auto& var = prod.variables().at(it->second.variable);
        for (std::size_t s = 0; s < prod.steps(); ++s) {
            auto date = std::chrono::floor<std::chrono::days>(prod.start() + prod.cadence() * static_cast<long long>(s));
            if (date < from || date > to) continue;
            out.samples.push_back({date, it->second.variable, prod.raw_value(it->second.variable, s, cell), var.unit});
        }
        return out;
    }
    throw Error(ErrorCode::ProviderFailure, "fixture has no dataset " + std::string(dataset));
}

SiteReading FixtureObservationProvider::history(std::string_view dataset, const core::GeoPoint& p, core::Date from,
                                                core::Date to) const {
    auto r = slice(dataset, p, from, to);
    if (r.samples.empty())
        throw Error(ErrorCode::NoDataForDate, "no " + std::string(dataset) + " data for " + core::format_date(from) +
                                                  (from == to ? "" : " to " + core::format_date(to)));
    return r;
}

SiteReading FixtureObservationProvider::forecast(std::string_view dataset, const core::GeoPoint& p,
                                                 int horizon) const {
    if (horizon < 1) throw Error(ErrorCode::InvalidArgument, "horizon must be at least 1 day");
    if (horizon > max_horizon(dataset))
        throw Error(ErrorCode::HorizonTooLong, "horizon " + std::to_string(horizon) + " exceeds provider maximum " +
                                                   std::to_string(max_horizon(dataset)));
    auto first = today_ + std::chrono::days(1);
    auto last = today_ + std::chrono::days(horizon);
    auto r = slice(dataset, p, first, last);
    for (auto d = first; d <= last; d += std::chrono::days(1))
        if (std::none_of(r.samples.begin(), r.samples.end(), [&](const RawSample& s) { return s.date == d; }))
            throw Error(ErrorCode::NoDataForDate, "fixture forecast lacks " + core::format_date(d));
    return r;
}

FixtureImageryProvider::FixtureImageryProvider(const std::filesystem::path& index_csv,
                                               const std::filesystem::path& image_dir, double site_radius_km)
    : radius_km_(site_radius_km) {
    for (const auto& f : read_csv_rows(index_csv, "lat,lon,date,image_id")) {
        if (f.size() != 4) throw Error(ErrorCode::ConfigError, "bad imagery index row");
        index_.push_back({core::GeoPoint(core::parse_double(f[0]), core::parse_double(f[1])), core::parse_date(f[2]), f[3]});
        if (!images_.count(f[3])) {
            auto img = load_raster(image_dir / (f[3] + ".raster"));
            img.id = f[3];
            images_.emplace(f[3], std::move(img));
        }
    }
}

RasterImage FixtureImageryProvider::retrieve(const core::GeoPoint& p, core::Date date) const {
    const Entry* best = nullptr;
    double best_d = std::numeric_limits<double>::infinity();
    for (const auto& e : index_) {
        if (e.date != date) continue;
        double d = core::haversine_km(p, e.point);
        if (d < best_d) {
            best_d = d;
            best = &e;
        }
    }
    if (!best || best_d > radius_km_)
        throw Error(ErrorCode::NoImagery, "no imagery for " + site_label(p) + " on " + core::format_date(date));
    return images_.at(best->image_id);
}

RasterImage FixtureImageryProvider::resolve(std::string_view ref) const {
    std::string_view id = ref;
    if (id.rfind("img:", 0) == 0) id.remove_prefix(4);
    auto it = images_.find(id);
    if (it == images_.end()) throw Error(ErrorCode::UnresolvableReference, "unknown image reference " + std::string(ref));
    return it->second;
}

FixtureSearchProvider::FixtureSearchProvider(const std::filesystem::path& jsonl) {
    auto in = open_or_throw(jsonl);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto j = json::parse(line);
        std::vector<SearchResult> results;
        for (const auto& r : j.at("results"))
            results.push_back({r.at("title").get<std::string>(), r.at("url").get<std::string>(),
                               r.value("snippet", std::string())});
        by_key_[query_key(j.at("query").get<std::string>())] = std::move(results);
    }
}

std::vector<SearchResult> FixtureSearchProvider::search(std::string_view query, std::size_t k) const {
    if (normalize_query(query).empty()) throw Error(ErrorCode::InvalidArgument, "empty search query");
    auto it = by_key_.find(query_key(query));
    if (it == by_key_.end()) return {};
    auto out = it->second;
    if (out.size() > k) out.resize(k);
    return out;
}

FixtureSpeciesProvider::FixtureSpeciesProvider(const std::filesystem::path& csv) {
    for (const auto& f : read_csv_rows(csv, "ref,species,confidence")) {
        if (f.size() != 3) throw Error(ErrorCode::ConfigError, "bad species fixture row");
        double c = core::parse_double(f[2]);
        if (c < 0.0 || c > 1.0) throw Error(ErrorCode::ConfigError, "confidence outside [0, 1]");
        by_ref_[f[0]].push_back({f[1], c});
    }
    for (auto& [ref, list] : by_ref_)
        std::stable_sort(list.begin(), list.end(), [](const SpeciesCandidate& a, const SpeciesCandidate& b) {
            return a.confidence > b.confidence;
        });
}

std::vector<SpeciesCandidate> FixtureSpeciesProvider::detect(std::string_view ref) const {
    auto it = by_ref_.find(ref);
    if (it == by_ref_.end()) throw Error(ErrorCode::UnresolvableReference, "unknown reference " + std::string(ref));
    return it->second;
}

FixturePageFetcher::FixturePageFetcher(const std::filesystem::path& dir) {
    for (const auto& f : read_csv_rows(dir / "index.csv", "url,file,kind")) {
        if (f.size() != 3) throw Error(ErrorCode::ConfigError, "bad page index row");
        auto in = open_or_throw(dir / f[1]);
        std::ostringstream body;
        body << in.rdbuf();
        pages_[f[0]] = {f[0], body.str(), f[2]};
    }
}

FetchedPage FixturePageFetcher::fetch(std::string_view url) const {
    auto it = pages_.find(url);
    if (it == pages_.end()) throw Error(ErrorCode::ProviderFailure, "no fixture page for " + std::string(url));
    return it->second;
}

ProviderSet load_fixture_providers(const std::filesystem::path& root) {
    auto in = open_or_throw(root / "fixture.json");
    json desc;
    try {
        desc = json::parse(in);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ConfigError, "fixture.json: " + std::string(e.what()));
    }
    if (desc.value("format", "") != "fixture-root/1")
        throw Error(ErrorCode::ConfigError, "fixture.json must declare format fixture-root/1");
    auto path = [&](const std::string& key) { return root / desc.at(key).get<std::string>(); };
    const double radius = desc.value("site_radius_km", 25.0);

    ProviderSet set;
    set.mode = "fixture";
    auto obs = std::make_shared<FixtureObservationProvider>(core::parse_date(desc.at("reference_date").get<std::string>()),
                                                            radius);
    for (const auto& [name, spec] : desc.at("observations").items()) {
        int horizon = spec.value("max_horizon", 7);
        if (spec.contains("csv")) {
            obs->add_csv(name, FixtureObservationProvider::load_csv(root / spec["csv"].get<std::string>(), horizon));
        } else if (spec.contains("grid")) {
            auto prod = std::make_shared<geoforge::GriddedProduct>(
                geoforge::GriddedProduct::load_file(root / spec["grid"].get<std::string>()));
            obs->add_grid(name, {prod, spec.at("variable").get<std::string>(), horizon});
        } else {
            throw Error(ErrorCode::ConfigError, "observation dataset " + name + " needs csv or grid");
        }
    }
    set.observations = obs;
    set.geocoder = std::make_shared<InventoryGeocoder>(geoforge::CityInventory::load_file(path("cities")));
    set.factors = std::make_shared<EmissionFactorTable>(EmissionFactorTable::load_file(path("emission_factors")));
    if (desc.contains("imagery"))
        set.imagery = std::make_shared<FixtureImageryProvider>(root / desc["imagery"].at("index").get<std::string>(),
                                                               root / desc["imagery"].at("dir").get<std::string>(),
                                                               radius);
    if (desc.contains("search")) set.search = std::make_shared<FixtureSearchProvider>(path("search"));
    if (desc.contains("birds")) set.birds = std::make_shared<FixtureSpeciesProvider>(path("birds"));
    if (desc.contains("species")) set.species = std::make_shared<FixtureSpeciesProvider>(path("species"));
    if (desc.contains("pages")) set.pages = std::make_shared<FixturePageFetcher>(path("pages"));
    return set;
}

}  // namespace climagent::tools
