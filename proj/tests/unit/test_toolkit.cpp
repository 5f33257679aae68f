#include <gtest/gtest.h>

#include <random>
#include <thread>

#include "climagent/core/error.hpp"
#include "climagent/toolkit/call.hpp"
#include "climagent/toolkit/observation.hpp"
#include "climagent/toolkit/registry.hpp"

using namespace climagent;
using namespace climagent::toolkit;
using nlohmann::json;

namespace {

ToolSignature point_sig(std::string name = "rain_inquiry") {
    ToolSignature s;
    s.name = std::move(name);
    s.category = Category::weather_hydrology;
    s.returns = ReturnKind::record;
    s.params = {{"lat", ParamType::real, true, -90.0, 90.0},
                {"lon", ParamType::real, true, -180.0, 180.0},
                {"date", ParamType::date, true, std::nullopt, std::nullopt}};
    return s;
}

ToolOutput rain_output(double mm, const std::string& unit = "mm") {
    ToolOutput out;
    out.payload = {{"quantities", json::array({{{"variable", "precipitation"}, {"unit", unit}, {"value", mm}}})}};
    return out;
}

ToolRegistry registry_with(Executor ex, std::chrono::milliseconds timeout = std::chrono::milliseconds(2000)) {
    ToolSignature geo;
    geo.name = "geocode_mapping";
    geo.category = Category::geospatial;
    geo.returns = ReturnKind::geopoint;
    geo.params = {{"region", ParamType::string}};
    return ToolRegistry::Builder()
        .add({point_sig(), std::move(ex), timeout})
        .add({geo, [](const ArgView&) { return ToolOutput{{{"lat", 25.0}, {"lon", 51.0}}}; }})
        .build();
}

ToolCall rain_call(std::string lat = "25.28", std::string lon = "51.53", std::string date = "2023-04-15") {
    return {"rain_inquiry", {{"lat", lat}, {"lon", lon}, {"date", date}}};
}

}  // namespace

TEST(CallGrammar, FencedCall) {
    auto p = parse_call("Let me check.\n```tool_call\n{\"tool\": \"rain_inquiry\", \"args\": {\"lat\": 25.2, \"lon\": \"51\", \"date\": \"2023-04-15\"}}\n```\n");
    ASSERT_TRUE(std::holds_alternative<ToolCall>(p));
    const auto& c = std::get<ToolCall>(p);
    EXPECT_EQ(c.tool, "rain_inquiry");
    EXPECT_EQ(c.args.at("lat"), "25.2");
    EXPECT_EQ(c.args.at("lon"), "51");
}

TEST(CallGrammar, ProseIsFinalAnswer) {
    auto p = parse_call("Doha received 12.0 mm.");
    ASSERT_TRUE(std::holds_alternative<FinalAnswer>(p));
    EXPECT_EQ(std::get<FinalAnswer>(p).text, "Doha received 12.0 mm.");
}

TEST(CallGrammar, Malformations) {
    for (const char* bad : {"```tool_call\n{not json}\n```", "```tool_call\n[1,2]\n```",
                            "```tool_call\n{\"tool\": \"x\"}\n```", "```tool_call\n{\"tool\": \"x\", \"args\": {}}",
                            "```tool_call\n{\"tool\": \"x y\", \"args\": {}}\n```",
                            "```tool_call\n{\"tool\": \"x\", \"args\": {\"a\": [1]}}\n```",
                            "```tool_call\n{\"tool\": \"a\", \"args\": {}}\n```\n```tool_call\n{\"tool\": \"b\", \"args\": {}}\n```",
                            "{\"tool\": \"rain_inquiry\", \"args\": {\"lat\": 1}}"})
        EXPECT_TRUE(std::holds_alternative<FormatError>(parse_call(bad))) << bad;
}

// property: serialize then parse is the identity
TEST(CallGrammar, SerializeRoundTrip) {
    std::mt19937_64 rng(3);
    const std::string alphabet = "abc xyz-_,.:0123456789\"\\";
    for (int trial = 0; trial < 200; ++trial) {
        ToolCall c;
        c.tool = "tool_" + std::to_string(rng() % 100);
        int n = static_cast<int>(rng() % 5);
        for (int k = 0; k < n; ++k) {
            std::string v;
            int len = 1 + static_cast<int>(rng() % 12);
            for (int i = 0; i < len; ++i) v += alphabet[rng() % alphabet.size()];
            c.args["p" + std::to_string(k)] = v;
        }
        auto back = parse_call(serialize_call(c));
        ASSERT_TRUE(std::holds_alternative<ToolCall>(back)) << serialize_call(c);
        EXPECT_EQ(std::get<ToolCall>(back), c);
    }
}

TEST(Validation, OkAndUnknownTool) {
    auto reg = registry_with([](const ArgView&) { return rain_output(1.0); });
    EXPECT_TRUE(validate_call(rain_call(), reg).ok());
    EXPECT_EQ(validate_call({"teleport", {}}, reg).kind, ValidationVerdict::Kind::unknown_tool);
    EXPECT_EQ(validate_emission(ParsedEmission{FormatError{"x"}}, reg).kind, ValidationVerdict::Kind::format_error);
}

// property: every offending field is reported, nothing else
TEST(Validation, ListsEveryOffendingField) {
    auto reg = registry_with([](const ArgView&) { return rain_output(1.0); });
    std::mt19937_64 rng(9);
    const std::vector<std::string> names{"lat", "lon", "date", "extra", "zone"};
    const std::vector<std::string> values{"25.1", "191", "2023-04-15", "abc", "2023-13-01", "-12"};
    for (int trial = 0; trial < 300; ++trial) {
        ToolCall c{"rain_inquiry", {}};
        for (const auto& n : names)
            if (rng() % 2) c.args[n] = values[rng() % values.size()];
        std::set<std::pair<std::string, std::string>> expect;
        for (const char* req : {"lat", "lon", "date"})
            if (!c.args.count(req)) expect.insert({"missing", req});
        for (const auto& [k, v] : c.args) {
            if (k == "extra" || k == "zone") {
                expect.insert({"unknown", k});
                continue;
            }
            bool good;
            if (k == "date")
                good = v == "2023-04-15";
            else {
                char* end = nullptr;
                double d = std::strtod(v.c_str(), &end);
                good = *end == '\0' && std::fabs(d) <= (k == "lat" ? 90.0 : 180.0);
            }
            if (!good) expect.insert({"type", k});
        }
        auto verdict = validate_call(c, reg);
        std::set<std::pair<std::string, std::string>> got;
        for (const auto& i : verdict.issues) got.insert({std::string(to_string(i.kind)), i.name});
        EXPECT_EQ(got, expect);
        EXPECT_EQ(verdict.ok(), expect.empty());
        if (!expect.empty()) EXPECT_EQ(verdict.kind, ValidationVerdict::Kind::arg_error);
    }
}

TEST(Execute, NormalizesUnits) {
    auto reg = registry_with([](const ArgView& a) {
        EXPECT_NEAR(a.real("lat"), 25.28, 1e-12);
        EXPECT_EQ(climagent::core::format_date(a.date("date")), "2023-04-15");
        return rain_output(1.2, "cm");
    });
    auto obs = execute(rain_call(), reg);
    ASSERT_TRUE(obs.status.ok) << obs.status.message;
    EXPECT_NEAR(obs.payload["quantities"][0]["value"].get<double>(), 12.0, 1e-9);
    EXPECT_EQ(obs.payload["quantities"][0]["unit"], "mm");
}

TEST(Execute, ValidationFailureNeverReachesExecutor) {
    bool called = false;
    auto reg = registry_with([&](const ArgView&) {
        called = true;
        return rain_output(1.0);
    });
    auto obs = execute(rain_call("north"), reg);
    EXPECT_FALSE(obs.status.ok);
    EXPECT_EQ(obs.status.code, "arg_error");
    EXPECT_FALSE(called);
}

TEST(Execute, ExecutorErrorsBecomeObservations) {
    auto reg = registry_with([](const ArgView&) -> ToolOutput {
        throw Error(ErrorCode::NoDataForDate, "no rain record for 2023-04-15");
    });
    auto obs = execute(rain_call(), reg);
    EXPECT_FALSE(obs.status.ok);
    EXPECT_EQ(obs.status.code, "no_data_for_date");
    auto reg2 = registry_with([](const ArgView&) -> ToolOutput { throw std::runtime_error("boom"); });
    EXPECT_EQ(execute(rain_call(), reg2).status.code, "executor_error");
}

TEST(Execute, SchemaViolation) {
    auto reg = registry_with([](const ArgView&) { return ToolOutput{{{"rain", 3}}}; });
    auto obs = execute(rain_call(), reg);
    EXPECT_EQ(obs.status.code, "schema_violation");
}

TEST(Execute, Timeout) {
    auto reg = registry_with(
        [](const ArgView&) {
            std::this_thread::sleep_for(std::chrono::milliseconds(300));
            return rain_output(1.0);
        },
        std::chrono::milliseconds(20));
    auto obs = execute(rain_call(), reg);
    EXPECT_FALSE(obs.status.ok);
    EXPECT_EQ(obs.status.code, "timeout");
}

TEST(Observation, JsonRoundTrip) {
    Observation o;
    o.tool = "rain_inquiry";
    o.payload = {{"x", 1}};
    o.units = "mm";
    o.timestamps = std::make_pair(std::string("2023-04-15T00:00:00Z"), std::string("2023-04-16T00:00:00Z"));
    o.location = climagent::core::GeoPoint(25.0, 51.0);
    o.uncertainty = 0.5;
    EXPECT_EQ(Observation::from_json(o.to_json()), o);
    auto f = Observation::failure("t", "timeout", "slow");
    EXPECT_EQ(Observation::from_json(f.to_json()), f);
}

TEST(Registry, DuplicateAndSubsets) {
    auto ex = [](const ArgView&) { return rain_output(1.0); };
    ToolRegistry::Builder b;
    b.add({point_sig(), ex});
    EXPECT_THROW(b.add({point_sig(), ex}), Error);
    auto reg = registry_with(ex);
    EXPECT_EQ(reg.size(), 2u);
    EXPECT_EQ(reg.subset({"rain_inquiry", "nope"}).size(), 1u);
    auto geo = reg.restricted_to({Category::geospatial});
    ASSERT_EQ(geo.size(), 1u);
    EXPECT_NE(geo.find("geocode_mapping"), nullptr);
    EXPECT_EQ(geo.find("rain_inquiry"), nullptr);
}

TEST(Registry, SignatureValidation) {
    auto s = point_sig();
    s.params.push_back(s.params.front());
    EXPECT_THROW(s.validate(), Error);
    s = point_sig("9lives");
    EXPECT_THROW(s.validate(), Error);
    EXPECT_EQ(point_sig().required_params(), (std::vector<std::string>{"lat", "lon", "date"}));
}

TEST(Prompt, DeterministicAndGrouped) {
    auto ex = [](const ArgView&) { return rain_output(1.0); };
    auto a = render_tool_prompt(registry_with(ex));
    auto b = render_tool_prompt(registry_with(ex));
    EXPECT_EQ(a, b);
    EXPECT_LT(a.find(std::string(category_title(Category::weather_hydrology))),
              a.find(std::string(category_title(Category::geospatial))));
    EXPECT_NE(a.find("rain_inquiry"), std::string::npos);
}
