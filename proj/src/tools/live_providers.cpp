#include <httplib.h>

#include <map>

#include <nlohmann/json.hpp>

#include "climagent/core/csv.hpp"
#include "climagent/core/error.hpp"
#include "climagent/tools/providers.hpp"

namespace climagent::tools {

using nlohmann::json;

namespace {

struct Field {
    const char* api_name;
    const char* variable;
};

struct DatasetSpec {
    enum class Endpoint { weather, air_quality, flood } endpoint;
    bool hourly;  // hourly fields are averaged into daily values
    std::vector<Field> fields;
    int max_horizon;
};

const DatasetSpec& dataset_spec(std::string_view dataset) {
    using E = DatasetSpec::Endpoint;
    static const std::map<std::string, DatasetSpec, std::less<>> specs{
        {"weather",
         {E::weather,
          false,
          {{"temperature_2m_mean", "temperature"},
           {"precipitation_sum", "precipitation"},
           {"wind_speed_10m_max", "wind_speed"},
           {"relative_humidity_2m_mean", "relative_humidity"}},
          16}},
        {"rain", {E::weather, false, {{"precipitation_sum", "precipitation"}}, 16}},
        {"uv", {E::weather, false, {{"uv_index_max", "uv_index"}}, 16}},
        {"aqi",
         {E::air_quality,
          true,
          {{"us_aqi", "aqi"},
           {"pm2_5", "pm2_5"},
           {"pm10", "pm10"},
           {"nitrogen_dioxide", "no2"},
           {"sulphur_dioxide", "so2"},
           {"ozone", "o3"},
           {"carbon_monoxide", "co"}},
          5}},
        {"pollen", {E::air_quality, true, {{"grass_pollen", "pollen"}}, 4}},
        {"discharge", {E::flood, false, {{"river_discharge", "discharge"}}, 30}},
    };
    auto it = specs.find(dataset);
    if (it == specs.end()) throw Error(ErrorCode::ProviderFailure, "no live source for dataset " + std::string(dataset));
    return it->second;
}

std::pair<std::string, std::string> split_url(const std::string& url) {
    auto scheme = url.find("://");
    if (scheme == std::string::npos) throw Error(ErrorCode::ConfigError, "URL needs a scheme: " + url);
    auto slash = url.find('/', scheme + 3);
    if (slash == std::string::npos) return {url, ""};
    auto prefix = url.substr(slash);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    return {url.substr(0, slash), prefix};
}

httplib::Result http_get(const std::string& url, std::chrono::seconds timeout) {
    auto [base, path] = split_url(url);
    httplib::Client client(base);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_follow_location(true);
    return client.Get(path.empty() ? "/" : path);
}

json get_json(const std::string& base, const std::string& path, const httplib::Params& params,
              std::chrono::seconds timeout) {
    auto [host, prefix] = split_url(base);
    httplib::Client client(host);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    auto res = client.Get(prefix + path, params, httplib::Headers{});
    if (!res) throw Error(ErrorCode::ProviderFailure, base + " unreachable: " + httplib::to_string(res.error()));
    if (res->status == 408 || res->status == 504) throw Error(ErrorCode::Timeout, base + " timed out");
    if (res->status != 200)
        throw Error(ErrorCode::ProviderFailure, base + path + " returned HTTP " + std::to_string(res->status));
    auto j = json::parse(res->body, nullptr, false);
    if (j.is_discarded()) throw Error(ErrorCode::ProviderFailure, base + path + " returned malformed JSON");
    if (j.value("error", false)) throw Error(ErrorCode::ProviderFailure, j.value("reason", std::string("API error")));
    return j;
}

std::string fmt_coord(double v) { return core::format_double(v); }

// Open-Meteo reports dimensionless fields with an empty unit.
std::string unit_or_one(const json& units, const char* field) {
    auto u = units.value(field, std::string());
    return u.empty() ? "1" : u;
}

}  // namespace

int OpenMeteoProvider::max_horizon(std::string_view dataset) const { return dataset_spec(dataset).max_horizon; }

core::Date OpenMeteoProvider::today() const {
    if (config_.today) return *config_.today;
    return std::chrono::floor<std::chrono::days>(std::chrono::system_clock::now());
}

SiteReading OpenMeteoProvider::query(std::string_view dataset, const core::GeoPoint& p, core::Date from,
                                     core::Date to, bool forecast) const {
    const auto& spec = dataset_spec(dataset);
    std::string fields;
    for (const auto& f : spec.fields) fields += (fields.empty() ? "" : ",") + std::string(f.api_name);
    httplib::Params params{{"latitude", fmt_coord(p.lat())},
                           {"longitude", fmt_coord(p.lon())},
                           {"start_date", core::format_date(from)},
                           {"end_date", core::format_date(to)},
                           {"timezone", "UTC"},
                           {spec.hourly ? "hourly" : "daily", fields}};
    std::string base, path;
    switch (spec.endpoint) {
        case DatasetSpec::Endpoint::weather:
            base = forecast ? config_.forecast_url : config_.archive_url;
            path = forecast ? "/v1/forecast" : "/v1/archive";
            break;
        case DatasetSpec::Endpoint::air_quality:
            base = config_.air_quality_url;
            path = "/v1/air-quality";
            break;
        case DatasetSpec::Endpoint::flood:
            base = config_.flood_url;
            path = "/v1/flood";
            break;
    }
    auto j = get_json(base, path, params, config_.timeout);
    const char* block = spec.hourly ? "hourly" : "daily";
    if (!j.contains(block) || !j[block].contains("time"))
        throw Error(ErrorCode::ProviderFailure, "response lacks " + std::string(block) + " data");
    const auto& data = j[block];
    const auto units = j.value(std::string(block) + "_units", json::object());

    SiteReading out;
    out.site = core::GeoPoint(j.value("latitude", p.lat()), j.value("longitude", p.lon()));
    out.site_name = "open-meteo " + fmt_coord(out.site.lat()) + "," + fmt_coord(out.site.lon());

    // Group by UTC day; hourly fields become the mean of their valid hours.
    std::map<core::Date, std::map<std::string, std::pair<double, int>>> days;
    const auto& times = data["time"];
    for (std::size_t k = 0; k < times.size(); ++k) {
        auto day = std::chrono::floor<std::chrono::days>(core::normalize_timestamp(times[k].get<std::string>()));
        auto& slot = days[day];
        for (const auto& f : spec.fields) {
            auto& acc = slot[f.api_name];
            if (data.contains(f.api_name) && k < data[f.api_name].size() && data[f.api_name][k].is_number()) {
                acc.first += data[f.api_name][k].get<double>();
                acc.second += 1;
            }
        }
    }
    for (const auto& [day, slot] : days) {
        for (const auto& f : spec.fields) {
            RawSample s{day, f.variable, std::nullopt, unit_or_one(units, f.api_name)};
            const auto& acc = slot.at(f.api_name);
            if (acc.second > 0) s.value = acc.first / acc.second;
            out.samples.push_back(std::move(s));
        }
    }
    return out;
}

SiteReading OpenMeteoProvider::history(std::string_view dataset, const core::GeoPoint& p, core::Date from,
                                       core::Date to) const {
    auto r = query(dataset, p, from, to, false);
    if (r.samples.empty()) throw Error(ErrorCode::NoDataForDate, "no data for " + core::format_date(from));
    return r;
}

SiteReading OpenMeteoProvider::forecast(std::string_view dataset, const core::GeoPoint& p, int horizon) const {
    if (horizon < 1) throw Error(ErrorCode::InvalidArgument, "horizon must be at least 1 day");
    if (horizon > max_horizon(dataset))
        throw Error(ErrorCode::HorizonTooLong, "horizon exceeds provider maximum " + std::to_string(max_horizon(dataset)));
    auto first = today() + std::chrono::days(1);
    auto r = query(dataset, p, first, today() + std::chrono::days(horizon), true);
    std::erase_if(r.samples, [&](const RawSample& s) { return s.date < first; });
    return r;
}

GeocodeResult OpenMeteoGeocoder::geocode(std::string_view region) const {
    if (normalize_query(region).empty()) throw Error(ErrorCode::InvalidArgument, "empty region name");
    auto j = get_json(config_.geocoding_url, "/v1/search",
                      {{"name", std::string(region)}, {"count", "1"}, {"language", "en"}, {"format", "json"}},
                      config_.timeout);
    if (!j.contains("results") || j["results"].empty())
        throw Error(ErrorCode::UnknownRegion, "geocoder found no match for '" + std::string(region) + "'");
    const auto& r = j["results"][0];
    return {core::GeoPoint(r.at("latitude").get<double>(), r.at("longitude").get<double>()),
            r.value("name", std::string(region)), r.value("country", std::string()), 1.0};
}

std::vector<SearchResult> SearxSearchProvider::search(std::string_view query, std::size_t k) const {
    if (normalize_query(query).empty()) throw Error(ErrorCode::InvalidArgument, "empty search query");
    if (config_.search_url.empty()) throw Error(ErrorCode::ProviderFailure, "no search endpoint configured");
    auto j = get_json(config_.search_url, "/search", {{"q", std::string(query)}, {"format", "json"}}, config_.timeout);
    std::vector<SearchResult> out;
    for (const auto& r : j.value("results", json::array())) {
        if (out.size() >= k) break;
        out.push_back({r.value("title", std::string()), r.value("url", std::string()), r.value("content", std::string())});
    }
    return out;
}

FetchedPage HttpPageFetcher::fetch(std::string_view url) const {
    auto res = http_get(std::string(url), timeout_);
    if (!res) throw Error(ErrorCode::ProviderFailure, std::string(url) + " unreachable");
    if (res->status != 200)
        throw Error(ErrorCode::ProviderFailure, std::string(url) + " returned HTTP " + std::to_string(res->status));
    auto type = res->get_header_value("Content-Type");
    return {std::string(url), res->body, type.find("html") != std::string::npos ? "html" : "pdf_text"};
}

ProviderSet make_live_providers(const LiveConfig& config, const ProviderSet* fallback) {
    ProviderSet set;
    if (fallback) set = *fallback;
    set.mode = "live";
    set.observations = std::make_shared<OpenMeteoProvider>(config);
    set.geocoder = std::make_shared<OpenMeteoGeocoder>(config);
    if (!config.search_url.empty()) set.search = std::make_shared<SearxSearchProvider>(config);
    set.pages = std::make_shared<HttpPageFetcher>(config.timeout);
    return set;
}

}  // namespace climagent::tools
