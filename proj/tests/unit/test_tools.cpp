#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "climagent/core/error.hpp"
#include "climagent/core/time.hpp"
#include "climagent/toolkit/observation.hpp"
#include "climagent/tools/analysis.hpp"
#include "climagent/tools/carbon.hpp"
#include "climagent/tools/providers.hpp"
#include "climagent/tools/raster.hpp"
#include "climagent/tools/suite.hpp"
#include "support.hpp"

using namespace climagent;
using namespace climagent::tools;
using climagent::toolkit::Category;
using climagent::toolkit::ToolCall;

namespace {

const ProviderSet& fixture_set() {
    static const ProviderSet set = load_fixture_providers(testsupport::fixtures());
    return set;
}

const toolkit::ToolRegistry& fixture_registry() {
    static const toolkit::ToolRegistry reg = build_registry(ToolManifest::defaults(), fixture_set());
    return reg;
}

toolkit::Observation call(const std::string& tool, std::map<std::string, std::string> args) {
    return toolkit::execute(ToolCall{tool, std::move(args)}, fixture_registry());
}

}  // namespace

TEST(Catalog, TwentyTwoToolsInSevenCategories) {
    const auto& cat = tool_catalog();
    EXPECT_EQ(cat.size(), 22u);
    std::set<Category> cats;
    std::set<std::string> names;
    for (const auto& e : cat) {
        cats.insert(e.signature.category);
        names.insert(e.signature.name);
        EXPECT_NO_THROW(e.signature.validate());
    }
    EXPECT_EQ(cats.size(), 7u);
    EXPECT_EQ(names.size(), 22u);
}

TEST(Catalog, RequiredParameters) {
    auto req = [](const char* t) { return find_catalog_entry(t)->signature.required_params(); };
    using V = std::vector<std::string>;
    EXPECT_EQ(req("geocode_mapping"), V{"region"});
    EXPECT_EQ(req("rain_inquiry"), (V{"lat", "lon", "date"}));
    EXPECT_EQ(req("weather_forecast"), (V{"lat", "lon", "days"}));
    EXPECT_EQ(req("pollen_forecast"), (V{"lat", "lon"}));
    EXPECT_EQ(req("weather_analysis"), (V{"lat", "lon", "start", "end"}));
    EXPECT_EQ(req("desertification_analysis"), (V{"image1", "image2"}));
    EXPECT_EQ(req("carbon_footprint_calculation"), (V{"country", "industry", "year", "revenue"}));
    EXPECT_EQ(find_catalog_entry("teleport"), nullptr);
}

TEST(Manifest, JsonRoundTripAndFamilyCheck) {
    auto m = ToolManifest::defaults();
    EXPECT_EQ(m.tools.size(), 22u);
    auto back = ToolManifest::from_json(m.to_json());
    EXPECT_EQ(back.to_json(), m.to_json());
    auto j = m.to_json();
    j["tools"][0]["family"] = "carbon";
    if (j["tools"][0]["tool"] == "carbon_footprint_calculation") j["tools"][0]["family"] = "search";
    EXPECT_THROW(ToolManifest::from_json(j), Error);
}

// range analysis
TEST(Analysis, ConstantSeries) {
    auto s = testsupport::daily(std::vector<std::optional<double>>(30, 21.7));
    auto r = analyze_series(s);
    EXPECT_EQ(r.stats.std, 0.0);
    EXPECT_EQ(r.slope_per_day, 0.0);
    EXPECT_TRUE(r.anomalies.empty());
    EXPECT_EQ(r.trend_label, "flat");
}

TEST(Analysis, LinearSlope) {
    std::vector<std::optional<double>> v;
    for (int t = 0; t < 40; ++t) v.push_back(t);
    EXPECT_NEAR(analyze_series(testsupport::daily(v)).slope_per_day, 1.0, 1e-9);
}

TEST(Analysis, MissingValuesIgnored) {
    auto r = analyze_series(testsupport::daily({1.0, std::nullopt, 3.0}));
    EXPECT_EQ(r.stats.n, 2u);
    EXPECT_NEAR(r.slope_per_day, 1.0, 1e-12);
    EXPECT_THROW(analyze_series(testsupport::daily({std::nullopt, std::nullopt})), Error);
}

TEST(Analysis, ThresholdFlags) {
    auto rain = testsupport::daily({0.0, 12.0, 10.0, 3.0}, "precipitation", "mm");
    auto r = analyze_series(rain, RangeFlags::events);
    ASSERT_EQ(r.flagged.size(), 1u);  // strictly above 10 mm
    EXPECT_EQ(r.flagged[0].value, 12.0);
    auto aqi = testsupport::daily({99.0, 100.0, 101.0, 150.0}, "aqi", "1");
    EXPECT_EQ(analyze_series(aqi, RangeFlags::exceedances).flagged.size(), 2u);
}

// property: anomalies equal a brute-force z pass
TEST(Analysis, AnomaliesMatchBruteForce) {
    std::mt19937_64 rng(21);
    std::normal_distribution<double> noise(30.0, 2.0);
    for (int trial = 0; trial < 25; ++trial) {
        std::vector<std::optional<double>> v;
        for (int k = 0; k < 120; ++k) v.push_back(noise(rng));
        for (int spikes = 0; spikes < trial % 3; ++spikes) v[rng() % v.size()] = 30.0 + 25.0 * (rng() % 2 ? 1 : -1);
        std::vector<double> xs;
        for (auto& x : v) xs.push_back(*x);
        double mean = 0, sq = 0;
        for (double x : xs) mean += x;
        mean /= xs.size();
        for (double x : xs) sq += (x - mean) * (x - mean);
        double sd = std::sqrt(sq / xs.size());
        std::vector<std::size_t> expect;
        for (std::size_t k = 0; k < xs.size(); ++k)
            if (std::fabs((xs[k] - mean) / sd) > 3.0) expect.push_back(k);
        auto r = analyze_series(testsupport::daily(v));
        ASSERT_EQ(r.anomalies.size(), expect.size());
        for (std::size_t a = 0; a < expect.size(); ++a)
            EXPECT_EQ(r.anomalies[a].time, testsupport::day(static_cast<int>(expect[a])));
    }
}

// raster
TEST(Raster, NdviNdwiPerPixel) {
    std::vector<double> red{0.1, 0.2, 0.3, 0.0}, nir{0.5, 0.2, 0.1, 0.0}, green{0.3, 0.3, 0.3, 0.3};
    auto img = testsupport::raster(2, 2, {{"red", red}, {"nir", nir}, {"green", green}});
    auto ndvi = calculate_ndvi(img);
    EXPECT_NEAR(*ndvi.values[0], (0.5 - 0.1) / 0.6, 1e-12);
    EXPECT_EQ(*ndvi.values[1], 0.0);
    EXPECT_NEAR(*ndvi.values[2], -0.5, 1e-12);
    EXPECT_FALSE(ndvi.values[3].has_value());
    EXPECT_NEAR(ndvi.stats.valid_fraction, 0.75, 1e-12);
    auto ndwi = calculate_ndwi(img);
    EXPECT_NEAR(*ndwi.values[0], (0.3 - 0.5) / 0.8, 1e-12);
    EXPECT_NEAR(*ndwi.values[3], 1.0, 1e-12);
}

TEST(Raster, BandErrors) {
    auto img = testsupport::raster(2, 2, {{"red", {0.1, 0.1, 0.1, 0.1}}});
    EXPECT_THROW(calculate_ndvi(img), Error);
    img.bands["nir"] = {0.1, 0.1, 0.1};
    EXPECT_THROW(img.validate(), Error);
    img.bands["nir"] = {0.1, 0.1, 0.1, 1.5};
    EXPECT_THROW(img.validate(), Error);
}

TEST(Raster, ParseTextFormat) {
    std::istringstream in(
        "raster v1\nwidth 2\nheight 1\npixel_size_m 30\nacquired 2023-04-15T07:00:00Z\nlat 24.2\nlon 55.7\n"
        "band red\n0.1 0.2\nband nir\n0.4 0.2\n");
    auto img = parse_raster(in, "x");
    EXPECT_EQ(img.width, 2u);
    EXPECT_EQ(img.pixel_size_m, 30.0);
    EXPECT_EQ(img.band("nir")[0], 0.4);
    std::istringstream bad("raster v1\nwidth 2\nheight 1\nband red\n0.1\n");
    EXPECT_THROW(parse_raster(bad), Error);
}

TEST(Raster, DesertificationIdentityAndShape) {
    auto img = load_raster(testsupport::fixtures() / "imagery" / "alain_2023-04-15.raster");
    auto rep = desertification_analysis(img, img);
    EXPECT_EQ(rep.degraded_area_fraction, 0.0);
    for (const auto& d : rep.delta_map) EXPECT_EQ(d.value_or(0.0), 0.0);
    auto small = testsupport::raster(2, 2, {{"red", {0.1, 0.1, 0.1, 0.1}}, {"nir", {0.2, 0.2, 0.2, 0.2}}});
    EXPECT_THROW(desertification_analysis(img, small), Error);
}

TEST(Raster, DegradationFraction) {
    auto before = testsupport::raster(2, 1, {{"red", {0.1, 0.1}}, {"nir", {0.5, 0.5}}});
    auto after = testsupport::raster(2, 1, {{"red", {0.1, 0.3}}, {"nir", {0.5, 0.3}}});
    auto rep = desertification_analysis(before, after);
    EXPECT_NEAR(rep.degraded_area_fraction, 0.5, 1e-12);
    EXPECT_NEAR(*rep.delta_map[1], 0.0 - (0.4 / 0.6), 1e-12);
}

// carbon
TEST(Carbon, FactorLookup) {
    std::istringstream in("country,industry,year,factor\nQatar,cement,2023,0.5\nUAE,oil and gas,2023,0.8\n");
    auto t = EmissionFactorTable::parse(in);
    EXPECT_EQ(carbon_footprint(t, "qatar", "Cement", 2023, 1e6).emissions_tco2e, 500000.0);
    EXPECT_EQ(t.factor("UAE", "oil-and-gas", 2023), 0.8);
    try {
        t.factor("Qatar", "cement", 1990);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::UnknownFactorKey);
    }
    EXPECT_THROW(carbon_footprint(t, "Qatar", "cement", 2023, -1.0), Error);
}

// providers
TEST(Providers, QueryKeyNormalizes) {
    EXPECT_EQ(normalize_query("  Doha   HEAT "), "doha heat");
    EXPECT_EQ(query_key("Doha heat"), query_key("doha  heat"));
    EXPECT_EQ(query_key("x").size(), 16u);
}

TEST(Providers, ForecastNeedsEveryDay) {
    FixtureObservationProvider p(core::parse_date("2023-04-15"));
    FixtureObservationProvider::CsvDataset ds;
    ds.max_horizon = 5;
    for (const char* d : {"2023-04-16", "2023-04-17", "2023-04-19"})
        ds.sites[{25.0, 51.0}].push_back({core::parse_date(d), "precipitation", 1.0, "mm"});
    p.add_csv("rain", ds);
    core::GeoPoint site(25.0, 51.0);
    EXPECT_EQ(p.forecast("rain", site, 2).samples.size(), 2u);
    try {
        p.forecast("rain", site, 3);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NoDataForDate);
    }
    try {
        p.forecast("rain", site, 6);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::HorizonTooLong);
    }
    EXPECT_THROW(p.history("rain", core::GeoPoint(10.0, 10.0), core::parse_date("2023-04-16"),
                           core::parse_date("2023-04-16")),
                 Error);
}

// suite over the fixture root
TEST(Suite, GeocodeDoha) {
    auto obs = call("geocode_mapping", {{"region", "doha"}});
    ASSERT_TRUE(obs.status.ok) << obs.status.message;
    EXPECT_NEAR(obs.payload["lat"].get<double>(), 25.2854, 1e-9);
    EXPECT_NEAR(obs.payload["lon"].get<double>(), 51.5310, 1e-9);
    EXPECT_EQ(call("geocode_mapping", {{"region", "Atlantis"}}).status.code, "unknown_region");
}

TEST(Suite, RainAndAqiInquiry) {
    auto rain = call("rain_inquiry", {{"lat", "25.2854"}, {"lon", "51.5310"}, {"date", "2023-04-15"}});
    ASSERT_TRUE(rain.status.ok) << rain.status.message;
    EXPECT_EQ(rain.payload["quantities"][0]["value"].get<double>(), 12.0);
    EXPECT_EQ(rain.payload["quantities"][0]["unit"], "mm");
    auto aqi = call("aqi_inquiry", {{"lat", "29.3759"}, {"lon", "47.9774"}, {"date", "2023-04-15"}});
    ASSERT_TRUE(aqi.status.ok) << aqi.status.message;
    bool found = false;
    for (const auto& q : aqi.payload["quantities"])
        if (q["variable"] == "aqi") {
            found = true;
            EXPECT_EQ(q["value"].get<double>(), 87.0);
            EXPECT_EQ(q["unit"], "1");
        }
    EXPECT_TRUE(found);
}

TEST(Suite, WindNormalizedToMetresPerSecond) {
    auto obs = call("weather_inquiry", {{"lat", "25.2854"}, {"lon", "51.5310"}, {"date", "2023-04-15"}});
    ASSERT_TRUE(obs.status.ok);
    // the weather CSV stores wind in km/h; recompute the source row here
    std::ifstream f(testsupport::fixtures() / "observations" / "weather.csv");
    std::string line;
    double kmh = -1;
    while (std::getline(f, line))
        if (line.rfind("25.2854,51.531,2023-04-15,wind_speed,", 0) == 0)
            kmh = std::stod(line.substr(line.find("wind_speed,") + 11));
    ASSERT_GT(kmh, 0);
    for (const auto& q : obs.payload["quantities"])
        if (q["variable"] == "wind_speed") {
            EXPECT_EQ(q["unit"], "m/s");
            EXPECT_NEAR(q["value"].get<double>(), kmh / 3.6, 1e-9);
        }
}

TEST(Suite, ForecastHorizons) {
    auto ok = call("weather_forecast", {{"lat", "25.2854"}, {"lon", "51.5310"}, {"days", "3"}});
    ASSERT_TRUE(ok.status.ok) << ok.status.message;
    for (const auto& s : ok.payload["series"]) EXPECT_EQ(s["points"].size(), 3u);
    EXPECT_EQ(ok.payload["series"][0]["points"][0]["time"], "2023-04-16T00:00:00Z");
    auto too_far = call("aqi_prediction", {{"lat", "29.3759"}, {"lon", "47.9774"}, {"horizon", "6"}});
    EXPECT_EQ(too_far.status.code, "horizon_too_long");
}

TEST(Suite, RangeAnalysisOverFixture) {
    auto obs = call("rain_analysis",
                    {{"lat", "25.2854"}, {"lon", "51.5310"}, {"start", "2023-03-01"}, {"end", "2023-04-15"}});
    ASSERT_TRUE(obs.status.ok) << obs.status.message;
    bool heavy = false;
    for (const auto& e : obs.payload["events"]) heavy |= e["time"] == "2023-04-15T00:00:00Z";
    EXPECT_TRUE(heavy);
    auto bad = call("weather_analysis",
                    {{"lat", "25.2854"}, {"lon", "51.5310"}, {"start", "2023-04-15"}, {"end", "2023-03-01"}});
    EXPECT_FALSE(bad.status.ok);
}

TEST(Suite, ImageryChain) {
    auto img = call("get_satellite_image", {{"lat", "24.2075"}, {"lon", "55.7447"}, {"date", "2023-04-15"}});
    ASSERT_TRUE(img.status.ok) << img.status.message;
    auto ref = img.payload["image_ref"].get<std::string>();
    EXPECT_EQ(ref, "img:alain_2023-04-15");
    auto ndvi = call("calculate_ndvi", {{"image", ref}});
    ASSERT_TRUE(ndvi.status.ok);
    // oracle over the raster file itself
    auto raw = load_raster(testsupport::fixtures() / "imagery" / "alain_2023-04-15.raster");
    double sum = 0;
    for (std::size_t k = 0; k < raw.width * raw.height; ++k)
        sum += (raw.band("nir")[k] - raw.band("red")[k]) / (raw.band("nir")[k] + raw.band("red")[k]);
    EXPECT_NEAR(ndvi.payload["stats"]["mean"].get<double>(), sum / (raw.width * raw.height), 1e-9);
    EXPECT_EQ(call("calculate_ndvi", {{"image", "img:missing"}}).status.code, "unresolvable_reference");
    auto change =
        call("desertification_analysis", {{"image1", "img:alain_2020-04-15"}, {"image2", "img:alain_2023-04-15"}});
    ASSERT_TRUE(change.status.ok);
    EXPECT_GT(change.payload["degraded_area_fraction"].get<double>(), 0.0);
}

TEST(Suite, CarbonAndDetectors) {
    auto c = call("carbon_footprint_calculation",
                  {{"country", "Qatar"}, {"industry", "cement"}, {"year", "2023"}, {"revenue", "1000000"}});
    ASSERT_TRUE(c.status.ok) << c.status.message;
    EXPECT_EQ(c.payload["value"].get<double>(), 500000.0);
    auto birds = call("detect_bird", {{"audio_clip", "audio:mangrove_dawn_01"}});
    ASSERT_TRUE(birds.status.ok);
    EXPECT_EQ(birds.payload["candidates"][0]["species"], "Upupa epops");
}

TEST(Suite, SearchAndSummarizeWithoutBackend) {
    auto s = call("online_search", {{"query", "Qatar national climate change action plan"}});
    ASSERT_TRUE(s.status.ok);
    EXPECT_EQ(s.payload["results"].size(), 1u);
    auto sum = call("summarize", {{"text", "Some long text."}});
    EXPECT_FALSE(sum.status.ok);
    EXPECT_EQ(sum.status.code, "provider_failure");
}

TEST(Suite, DischargeUsesRiverMask) {
    auto obs = call("river_discharge_check", {{"lat", "25.2"}, {"lon", "51.1"}, {"date", "2023-04-10"}});
    ASSERT_TRUE(obs.status.ok) << obs.status.message;
    EXPECT_EQ(obs.payload["quantities"][0]["unit"], "m³/s");
    EXPECT_GT(obs.payload["quantities"][0]["value"].get<double>(), 0.0);
}
