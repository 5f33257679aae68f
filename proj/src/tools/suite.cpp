#include "climagent/tools/suite.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include "climagent/core/csv.hpp"
#include "climagent/core/error.hpp"
#include "climagent/core/units.hpp"

namespace climagent::tools {

using nlohmann::json;
using toolkit::ArgView;
using toolkit::Category;
using toolkit::ParamSpec;
using toolkit::ParamType;
using toolkit::ReturnKind;
using toolkit::ToolOutput;

std::string_view to_string(Family f) {
    switch (f) {
        case Family::geocode: return "geocode";
        case Family::point_inquiry: return "point_inquiry";
        case Family::forecast: return "forecast";
        case Family::range_analysis: return "range_analysis";
        case Family::satellite_image: return "satellite_image";
        case Family::spectral_index: return "spectral_index";
        case Family::desertification: return "desertification";
        case Family::carbon: return "carbon";
        case Family::search: return "search";
        case Family::summarize: return "summarize";
        case Family::detect: return "detect";
    }
    return "?";
}

std::optional<Family> parse_family(std::string_view s) {
    for (int k = 0; k <= static_cast<int>(Family::detect); ++k)
        if (to_string(static_cast<Family>(k)) == s) return static_cast<Family>(k);
    return std::nullopt;
}

namespace {

ParamSpec lat() { return {"lat", ParamType::real, true, -90.0, 90.0}; }
ParamSpec lon() { return {"lon", ParamType::real, true, -180.0, 180.0}; }
ParamSpec date(std::string name = "date") { return {std::move(name), ParamType::date, true, {}, {}}; }
ParamSpec horizon(std::string name, bool required) { return {std::move(name), ParamType::integer, required, 1.0, {}}; }
ParamSpec typed(std::string name, ParamType type) { return {std::move(name), type, true, {}, {}}; }

CatalogEntry entry(std::string name, Category cat, std::vector<ParamSpec> params, ReturnKind ret,
                   std::string description, Family family, std::string dataset = {},
                   std::vector<std::string> variables = {}) {
    CatalogEntry e{{std::move(name), cat, std::move(params), ret, std::move(description)}, family,
                   std::move(dataset), std::move(variables)};
    e.signature.validate();
    return e;
}

std::vector<CatalogEntry> make_catalog() {
    using C = Category;
    using R = ReturnKind;
    std::vector<CatalogEntry> c{
        entry("get_satellite_image", C::remote_sensing, {lat(), lon(), date()}, R::image,
              "Retrieve a multispectral satellite image for a coordinate and date.", Family::satellite_image),
        entry("calculate_ndvi", C::remote_sensing, {typed("image", ParamType::image_ref)}, R::index_map,
              "Compute NDVI from an image to quantify vegetation condition (map + stats).", Family::spectral_index,
              "ndvi"),
        entry("calculate_ndwi", C::remote_sensing, {typed("image", ParamType::image_ref)}, R::index_map,
              "Compute NDWI from an image to highlight water and moisture (map + stats).", Family::spectral_index,
              "ndwi"),
        entry("desertification_analysis", C::remote_sensing,
              {typed("image1", ParamType::image_ref), typed("image2", ParamType::image_ref)}, R::change_report,
              "Compare two images and return land-degradation indicators (NDVI delta and affected area).",
              Family::desertification),
        entry("detect_bird", C::biodiversity, {typed("audio_clip", ParamType::audio_ref)}, R::candidates,
              "Recognize bird calls from audio, returning candidate species with confidence.", Family::detect,
              "birds"),
        entry("detect_species", C::biodiversity, {typed("image", ParamType::image_ref)}, R::candidates,
              "Classify plant or animal species from an image, returning candidates with confidence.",
              Family::detect, "species"),
        entry("online_search", C::web, {typed("query", ParamType::string)}, R::search_results,
              "Targeted search for policies, reports and event coverage; ranked results with snippets.",
              Family::search),
        entry("summarize", C::web, {typed("text", ParamType::string)}, R::text,
              "Produce a concise summary preserving key facts and implications.", Family::summarize),
        entry("carbon_footprint_calculation", C::carbon,
              {typed("country", ParamType::string),
               typed("industry", ParamType::string),
               {"year", ParamType::integer, true, 1900.0, 2100.0},
               {"revenue", ParamType::real, true, 0.0, {}}},
              R::quantity, "Estimate annual emissions (tCO2e) for a country, industry and year from revenue.",
              Family::carbon),
        entry("aqi_inquiry", C::air_quality, {lat(), lon(), date()}, R::record,
              "Return AQI and pollutant values for a location and date.", Family::point_inquiry, "aqi"),
        entry("aqi_prediction", C::air_quality, {lat(), lon(), horizon("horizon", true)}, R::series,
              "Forecast AQI for a location over a horizon in days.", Family::forecast, "aqi", {"aqi"}),
        entry("aqi_analysis", C::air_quality, {lat(), lon(), date("start"), date("end")}, R::analysis,
              "Summarize AQI statistics, trend and exceedances over a date range.", Family::range_analysis, "aqi",
              {"aqi"}),
        entry("pollen_forecast", C::air_quality, {lat(), lon(), horizon("horizon", false)}, R::series,
              "Return forecast pollen levels for a location.", Family::forecast, "pollen", {"pollen"}),
        entry("uv_index_forecast", C::air_quality, {lat(), lon(), horizon("horizon", false)}, R::series,
              "Return the UV index forecast for a location.", Family::forecast, "uv", {"uv_index"}),
        entry("weather_inquiry", C::weather_hydrology, {lat(), lon(), date()}, R::record,
              "Return historical weather variables for a location and date.", Family::point_inquiry, "weather"),
        entry("weather_forecast", C::weather_hydrology, {lat(), lon(), horizon("days", true)}, R::series,
              "Return the weather forecast for the next n days.", Family::forecast, "weather"),
        entry("weather_analysis", C::weather_hydrology, {lat(), lon(), date("start"), date("end")}, R::analysis,
              "Compute temperature statistics, trend and anomalies over a date range.", Family::range_analysis,
              "weather", {"temperature"}),
        entry("rain_inquiry", C::weather_hydrology, {lat(), lon(), date()}, R::record,
              "Return precipitation (mm) for a location and date.", Family::point_inquiry, "rain",
              {"precipitation"}),
        entry("rain_prediction", C::weather_hydrology, {lat(), lon(), horizon("horizon", true)}, R::series,
              "Forecast precipitation for a location over a horizon in days.", Family::forecast, "rain",
              {"precipitation"}),
        entry("rain_analysis", C::weather_hydrology, {lat(), lon(), date("start"), date("end")}, R::analysis,
              "Summarize rainfall statistics and heavy-rain events over a date range.", Family::range_analysis,
              "rain", {"precipitation"}),
        entry("river_discharge_check", C::weather_hydrology, {lat(), lon(), date()}, R::record,
              "Return simulated river discharge (m3/s) for the nearest river grid cell at a date.",
              Family::point_inquiry, "discharge", {"discharge"}),
        entry("geocode_mapping", C::geospatial, {typed("region", ParamType::string)}, R::geopoint,
              "Resolve a region or city name to coordinates for downstream tool calls.", Family::geocode),
    };
    std::sort(c.begin(), c.end(),
              [](const CatalogEntry& a, const CatalogEntry& b) { return a.signature.name < b.signature.name; });
    return c;
}

template <typename T>
const T& need(const std::shared_ptr<const T>& p, std::string_view what) {
    if (!p) throw Error(ErrorCode::ProviderFailure, "no " + std::string(what) + " provider configured");
    return *p;
}

bool wanted(const std::vector<std::string>& variables, const std::string& v) {
    return variables.empty() || std::find(variables.begin(), variables.end(), v) != variables.end();
}

json point_json(const core::GeoPoint& p) { return {{"lat", p.lat()}, {"lon", p.lon()}}; }

std::string day_iso(core::Date d) { return core::format_iso(core::Instant(d)); }

struct Context {
    ProviderSet providers;
    SuiteOptions options;
};

toolkit::Executor make_executor(const CatalogEntry& cat, const std::string& dataset,
                                std::shared_ptr<const Context> ctx) {
    const auto vars = cat.variables;
    const auto tool = cat.signature.name;
    switch (cat.family) {
        case Family::geocode:
            return [ctx](const ArgView& a) {
                auto g = need(ctx->providers.geocoder, "geocoding").geocode(a.string("region"));
                ToolOutput out;
                out.payload = {{"lat", g.point.lat()},
                               {"lon", g.point.lon()},
                               {"name", g.name},
                               {"country", g.country},
                               {"similarity", g.similarity}};
                out.location = g.point;
                return out;
            };
        case Family::point_inquiry:
            return [ctx, dataset, vars](const ArgView& a) {
                auto p = a.lat_lon();
                auto d = a.date("date");
                auto r = need(ctx->providers.observations, "observation").history(dataset, p, d, d);
                json q = json::array();
                for (const auto& s : r.samples)
                    if (s.date == d && wanted(vars, s.variable))
                        q.push_back({{"variable", s.variable}, {"value", s.value ? json(*s.value) : json()}, {"unit", s.unit}});
                if (q.empty()) throw Error(ErrorCode::NoDataForDate, "no " + dataset + " values on " + core::format_date(d));
                ToolOutput out;
                out.payload = {{"quantities", q},
                               {"date", core::format_date(d)},
                               {"location", point_json(r.site)},
                               {"site", r.site_name}};
                out.location = r.site;
                out.timespan = {{day_iso(d), day_iso(d + std::chrono::days(1))}};
                return out;
            };
        case Family::forecast:
            return [ctx, dataset, vars, tool](const ArgView& a) {
                auto p = a.lat_lon();
                const std::string hname = tool == "weather_forecast" ? "days" : "horizon";
                auto h = a.integer_or(hname, 3);
                const auto& obs = need(ctx->providers.observations, "observation");
                auto r = obs.forecast(dataset, p, static_cast<int>(h));
                std::vector<std::string> order;
                std::map<std::string, json> series;
                for (const auto& s : r.samples) {
                    if (!wanted(vars, s.variable)) continue;
                    if (!series.count(s.variable)) {
                        order.push_back(s.variable);
                        series[s.variable] = {{"variable", s.variable}, {"unit", s.unit}, {"points", json::array()}};
                    }
                    series[s.variable]["points"].push_back(
                        {{"time", day_iso(s.date)}, {"value", s.value ? json(*s.value) : json()}});
                }
                json list = json::array();
                for (const auto& v : order) {
                    if (series[v]["points"].size() != static_cast<std::size_t>(h))
                        throw Error(ErrorCode::ProviderFailure, "forecast for " + v + " has the wrong length");
                    list.push_back(series[v]);
                }
                if (list.empty()) throw Error(ErrorCode::ProviderFailure, "provider returned no forecast");
                auto first = obs.today() + std::chrono::days(1);
                ToolOutput out;
                out.payload = {{"series", list},
                               {"issued", core::format_date(obs.today())},
                               {"horizon", h},
                               {"location", point_json(r.site)}};
                out.location = r.site;
                out.timespan = {{day_iso(first), day_iso(first + std::chrono::days(h))}};
                return out;
            };
        case Family::range_analysis:
            return [ctx, dataset, vars, tool](const ArgView& a) {
                auto p = a.lat_lon();
                auto start = a.date("start");
                auto end = a.date("end");
                if (start >= end) throw Error(ErrorCode::EmptyRange, "start must precede end");
                const auto& obs = need(ctx->providers.observations, "observation");
                SiteReading r;
                try {
                    r = obs.history(dataset, p, start, end);
                } catch (const Error& e) {
                    if (e.code() == ErrorCode::NoDataForDate) throw Error(ErrorCode::EmptyRange, e.what());
                    throw;
                }
                const auto& variable = vars.at(0);
                const auto& units = core::UnitTable::builtin();
                std::vector<core::CanonicalRecord> recs;
                for (const auto& s : r.samples) {
                    if (s.variable != variable) continue;
                    core::CanonicalRecord rec;
                    rec.timestamp = core::Instant(s.date);
                    rec.variable = variable;
                    rec.unit = units.canonical_unit(variable);
                    rec.location = r.site;
                    rec.source = obs.describe();
                    if (s.value) rec.value = units.to_canonical(*s.value, s.unit, variable).first;
                    recs.push_back(std::move(rec));
                }
                if (recs.empty()) throw Error(ErrorCode::EmptyRange, "no " + variable + " data in range");
                auto flags = tool == "aqi_analysis"    ? RangeFlags::exceedances
                             : tool == "rain_analysis" ? RangeFlags::events
                                                       : RangeFlags::none;
                auto rep = analyze_series(core::CanonicalSeries(std::move(recs)), flags, ctx->options.analysis);
                ToolOutput out;
                out.payload = rep.to_json();
                out.payload["location"] = point_json(r.site);
                out.location = r.site;
                out.timespan = {{day_iso(start), day_iso(end + std::chrono::days(1))}};
                return out;
            };
        case Family::satellite_image:
            return [ctx](const ArgView& a) {
                auto img = need(ctx->providers.imagery, "imagery").retrieve(a.lat_lon(), a.date("date"));
                json bands = json::array();
                for (const auto& [name, data] : img.bands) bands.push_back(name);
                ToolOutput out;
                out.payload = {{"image_ref", "img:" + img.id},
                               {"width", img.width},
                               {"height", img.height},
                               {"pixel_size_m", img.pixel_size_m},
                               {"acquired", core::format_iso(img.acquired)},
                               {"location", point_json(img.location)},
                               {"bands", bands}};
                out.location = img.location;
                out.timespan = {{core::format_iso(img.acquired), core::format_iso(img.acquired)}};
                return out;
            };
        case Family::spectral_index:
            return [ctx, dataset](const ArgView& a) {
                auto img = need(ctx->providers.imagery, "imagery").resolve(a.string("image"));
                auto map = dataset == "ndvi" ? calculate_ndvi(img) : calculate_ndwi(img);
                ToolOutput out;
                out.payload = map.to_json();
                out.payload["image_ref"] = a.string("image");
                out.location = img.location;
                return out;
            };
        case Family::desertification:
            return [ctx](const ArgView& a) {
                const auto& imagery = need(ctx->providers.imagery, "imagery");
                auto before = imagery.resolve(a.string("image1"));
                auto after = imagery.resolve(a.string("image2"));
                auto rep = desertification_analysis(before, after, ctx->options.degradation_threshold);
                ToolOutput out;
                out.payload = rep.to_json();
                out.payload["image1"] = a.string("image1");
                out.payload["image2"] = a.string("image2");
                out.location = before.location;
                out.timespan = {{core::format_iso(before.acquired), core::format_iso(after.acquired)}};
                return out;
            };
        case Family::carbon:
            return [ctx](const ArgView& a) {
                auto year = static_cast<int>(a.integer("year"));
                auto revenue = a.real("revenue");
                auto est = carbon_footprint(need(ctx->providers.factors, "emission factor"), a.string("country"),
                                            a.string("industry"), year, revenue);
                ToolOutput out;
                out.payload = {{"variable", "emissions"},
                               {"value", est.emissions_tco2e},
                               {"unit", "tCO2e"},
                               {"factor", est.factor},
                               {"revenue", revenue},
                               {"country", a.string("country")},
                               {"industry", a.string("industry")},
                               {"year", year}};
                return out;
            };
        case Family::search:
            return [ctx](const ArgView& a) {
                auto results = need(ctx->providers.search, "search").search(a.string("query"), ctx->options.search_results);
                json list = json::array();
                for (std::size_t k = 0; k < results.size(); ++k)
                    list.push_back({{"rank", k + 1},
                                    {"title", results[k].title},
                                    {"url", results[k].url},
                                    {"snippet", results[k].snippet}});
                ToolOutput out;
                out.payload = {{"query", a.string("query")}, {"results", list}};
                return out;
            };
        case Family::summarize:
            return [ctx](const ArgView& a) {
                if (!ctx->options.summarizer) throw Error(ErrorCode::ProviderFailure, "no summarization backend configured");
                llm::ChatRequest req;
                req.channel = "summarize";
                req.messages = {{"system", "Summarize the text in at most " +
                                               std::to_string(ctx->options.summary_word_budget) +
                                               " words, preserving key facts, numbers and implications."},
                                {"user", a.string("text")}};
                std::string summary;
                try {
                    summary = ctx->options.summarizer->complete(req);
                } catch (const Error& e) {
                    throw Error(ErrorCode::ProviderFailure, e.what());
                }
                ToolOutput out;
                out.payload = {{"summary", summary}, {"word_budget", ctx->options.summary_word_budget}};
                return out;
            };
        case Family::detect:
            return [ctx, dataset, tool](const ArgView& a) {
                const auto& provider = dataset == "birds" ? need(ctx->providers.birds, "bird detection")
                                                          : need(ctx->providers.species, "species detection");
                auto ref = a.string(tool == "detect_bird" ? "audio_clip" : "image");
                json list = json::array();
                for (const auto& c : provider.detect(ref))
                    list.push_back({{"species", c.species}, {"confidence", c.confidence}});
                ToolOutput out;
                out.payload = {{"ref", ref}, {"candidates", list}};
                return out;
            };
    }
    throw Error(ErrorCode::ConfigError, "unhandled family for " + tool);
}

}  // namespace

const std::vector<CatalogEntry>& tool_catalog() {
    static const std::vector<CatalogEntry> catalog = make_catalog();
    return catalog;
}

const CatalogEntry* find_catalog_entry(std::string_view tool) {
    for (const auto& e : tool_catalog())
        if (e.signature.name == tool) return &e;
    return nullptr;
}

ToolManifest ToolManifest::defaults() {
    ToolManifest m;
    for (const auto& e : tool_catalog()) m.tools.push_back({e.signature.name, e.family, e.dataset, true, {}});
    return m;
}

ToolManifest ToolManifest::from_json(const json& j) {
    if (j.value("format", "") != "tool-manifest/1")
        throw Error(ErrorCode::ConfigError, "tool manifest must declare format tool-manifest/1");
    ToolManifest m;
    for (const auto& t : j.at("tools")) {
        auto name = t.at("tool").get<std::string>();
        const auto* cat = find_catalog_entry(name);
        if (!cat) throw Error(ErrorCode::ConfigError, "manifest names unknown tool " + name);
        auto family = parse_family(t.value("family", std::string(to_string(cat->family))));
        if (!family || *family != cat->family)
            throw Error(ErrorCode::ConfigError, "manifest family for " + name + " must be " +
                                                    std::string(to_string(cat->family)));
        ManifestEntry e{name, *family, t.value("dataset", cat->dataset), t.value("enabled", true), {}};
        if (t.contains("timeout_ms")) e.timeout = std::chrono::milliseconds(t["timeout_ms"].get<long long>());
        m.tools.push_back(std::move(e));
    }
    return m;
}

ToolManifest ToolManifest::load_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ConfigError, "cannot open tool manifest " + path.string());
    try {
        return from_json(json::parse(in));
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ConfigError, path.string() + ": " + e.what());
    }
}

json ToolManifest::to_json() const {
    json tools = json::array();
    for (const auto& t : this->tools) {
        json e{{"tool", t.tool}, {"family", to_string(t.family)}, {"dataset", t.dataset}, {"enabled", t.enabled}};
        if (t.timeout) e["timeout_ms"] = t.timeout->count();
        tools.push_back(std::move(e));
    }
    return {{"format", "tool-manifest/1"}, {"tools", tools}};
}

toolkit::ToolRegistry build_registry(const ToolManifest& manifest, const ProviderSet& providers,
                                     const SuiteOptions& options) {
    auto ctx = std::make_shared<const Context>(Context{providers, options});
    toolkit::ToolRegistry::Builder b;
    for (const auto& m : manifest.tools) {
        if (!m.enabled) continue;
        const auto* cat = find_catalog_entry(m.tool);
        if (!cat) throw Error(ErrorCode::ConfigError, "unknown tool " + m.tool);
        toolkit::ToolBinding binding;
        binding.signature = cat->signature;
        binding.executor = make_executor(*cat, m.dataset, ctx);
        binding.timeout = m.timeout.value_or(options.default_timeout);
        // Backends are not required to be reentrant.
        binding.serialized = cat->family == Family::summarize;
        b.add(std::move(binding));
    }
    return b.build();
}

}  // namespace climagent::tools
