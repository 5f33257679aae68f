#include <gtest/gtest.h>

#include <cstdlib>
#include <thread>

#include <httplib.h>

#include "climagent/agent/agent.hpp"
#include "climagent/core/error.hpp"
#include "climagent/llm/backend.hpp"
#include "climagent/toolkit/call.hpp"
#include "climagent/tools/suite.hpp"
#include "support.hpp"

using namespace climagent;
using namespace climagent::agent;
using llm::ScriptedBackend;
using nlohmann::json;

namespace {

const toolkit::ToolRegistry& registry() {
    static const auto providers = tools::load_fixture_providers(testsupport::fixtures());
    static const auto reg = tools::build_registry(tools::ToolManifest::defaults(), providers);
    return reg;
}

std::string call_text(const std::string& tool, json args) {
    return "```tool_call\n" + json{{"tool", tool}, {"args", args}}.dump() + "\n```";
}

const std::string kQuery = "How much rain fell in Doha on 2023-04-15?";

ScriptedBackend doha(std::vector<std::string> agent_emissions) {
    return ScriptedBackend({{"route", std::nullopt, {R"({"intent": "numerical"})"}},
                            {"agent", std::nullopt, std::move(agent_emissions)}});
}

std::vector<std::string> doha_calls() {
    return {call_text("geocode_mapping", {{"region", "Doha"}}),
            call_text("rain_inquiry", {{"lat", "25.2854"}, {"lon", "51.5310"}, {"date", "2023-04-15"}})};
}

}  // namespace

TEST(Scripted, SelectionAndExhaustion) {
    ScriptedBackend b({{"agent", std::string("Doha"), {"a0", "a1"}},
                       {"agent", std::nullopt, {"any"}, true}});
    llm::ChatRequest r{"agent", {{"system", "s"}, {"user", "rain in Doha"}}, 1};
    EXPECT_EQ(b.complete(r), "a1");
    r.turn = 2;
    EXPECT_THROW(b.complete(r), Error);
    llm::ChatRequest other{"agent", {{"user", "Kuwait"}}, 7};
    EXPECT_EQ(b.complete(other), "any");
    llm::ChatRequest none{"facts", {{"user", "x"}}, 0};
    EXPECT_THROW(b.complete(none), Error);
    auto back = ScriptedBackend::from_json(b.to_json());
    EXPECT_EQ(back.to_json(), b.to_json());
    EXPECT_THROW(ScriptedBackend::from_json(json{{"format", "other"}}), Error);
}

TEST(Remote, ChatCompletionsRoundTrip) {
    httplib::Server server;
    std::string seen_auth;
    json seen_body;
    server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
        seen_auth = req.get_header_value("Authorization");
        seen_body = json::parse(req.body);
        res.set_content(R"({"choices": [{"message": {"role": "assistant", "content": "hello"}}]})",
                        "application/json");
    });
    int port = server.bind_to_any_port("127.0.0.1");
    std::thread th([&] { server.listen_after_bind(); });
    server.wait_until_ready();
    ::setenv("CLIMAGENT_TEST_KEY", "sekrit", 1);
    llm::RemoteConfig cfg{"http://127.0.0.1:" + std::to_string(port) + "/v1", "m", "CLIMAGENT_TEST_KEY",
                          std::chrono::seconds(5), 0.0};
    llm::RemoteChatBackend b(cfg);
    llm::ChatRequest r{"agent", {{"system", "s"}, {"user", "q"}, {"tool", "{}"}}, 0};
    EXPECT_EQ(b.complete(r), "hello");
    EXPECT_EQ(seen_auth, "Bearer sekrit");
    EXPECT_EQ(seen_body["messages"][2]["role"], "user");
    EXPECT_EQ(seen_body["messages"][2]["content"], "Observation: {}");
    server.stop();
    th.join();
    try {
        b.complete(r);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::BackendFailure);
    }
}

TEST(Routing, LabelAndFallback) {
    ScriptedBackend b({{"route", std::string("air"), {"The intent is health_environmental."}},
                       {"route", std::string("garbage"), {"no idea"}}});
    auto i = route_intent("air quality in Kuwait", b);
    EXPECT_EQ(i.label, IntentLabel::health_environmental);
    EXPECT_EQ(i.routed, categories_for(IntentLabel::health_environmental));
    auto f = route_intent("garbage", b);
    EXPECT_FALSE(f.label.has_value());
    EXPECT_EQ(f.routed.size(), 7u);
    auto g = route_intent("no script at all", b);
    EXPECT_EQ(g.routed.size(), 7u);
}

TEST(Run, DohaRainGrounded) {
    auto emissions = doha_calls();
    emissions.push_back("Doha received 12.0 mm of rain on 2023-04-15 [2].");
    auto b = doha(emissions);
    auto r = run(kQuery, registry(), b);
    EXPECT_EQ(r.trajectory.termination, "final_answer");
    ASSERT_EQ(r.trajectory.steps.size(), 3u);
    EXPECT_TRUE(r.trajectory.steps[1].ok_observation());
    EXPECT_FALSE(r.trajectory.steps[1].routing_miss);
    EXPECT_EQ(r.answer.citations, std::vector<int>{2});
    EXPECT_FALSE(r.answer.ungrounded);
    EXPECT_FALSE(r.answer.incomplete);
    // trajectories serialize deterministically
    auto b2 = doha(emissions);
    EXPECT_EQ(run(kQuery, registry(), b2).trajectory.to_json().dump(), r.trajectory.to_json().dump());
}

TEST(Run, InventedNumberFlagged) {
    auto emissions = doha_calls();
    emissions.push_back("Doha received 17.5 mm of rain on 2023-04-15 [2].");
    auto b = doha(emissions);
    auto r = run(kQuery, registry(), b);
    EXPECT_TRUE(r.answer.ungrounded);
    EXPECT_EQ(r.answer.ungrounded_numbers, std::vector<std::string>{"17.5"});
}

TEST(Run, ConsecutiveFailuresForceTermination) {
    auto b = doha({"```tool_call\n{oops}\n```", call_text("rain_inquiry", {{"lat", "north"}}), "never reached"});
    auto r = run(kQuery, registry(), b);
    EXPECT_EQ(r.trajectory.termination, "forced_termination");
    EXPECT_EQ(r.trajectory.steps.size(), 2u);
    EXPECT_EQ(r.trajectory.steps[0].verdict, "format_error");
    EXPECT_EQ(r.trajectory.steps[1].verdict, "arg_error");
    EXPECT_TRUE(r.answer.incomplete);
}

TEST(Run, BudgetExhaustedAndSynthesized) {
    ScriptedBackend b({{"route", std::nullopt, {R"({"intent": "numerical"})"}},
                       {"agent", std::nullopt, {call_text("geocode_mapping", {{"region", "Doha"}})}, true},
                       {"synthesize", std::nullopt, {"Doha sits at 25.2854 N [1]."}}});
    AgentOptions o;
    o.budget = 3;
    auto r = run(kQuery, registry(), b, o);
    EXPECT_EQ(r.trajectory.termination, "budget_exhausted");
    EXPECT_EQ(r.trajectory.steps.size(), 3u);
    EXPECT_TRUE(r.answer.incomplete);
    EXPECT_EQ(r.answer.text, "Doha sits at 25.2854 N [1].");
    EXPECT_FALSE(r.answer.ungrounded);
}

TEST(Run, BackendFailureRecorded) {
    ScriptedBackend b({{"route", std::nullopt, {R"({"intent": "numerical"})"}}});
    auto r = run(kQuery, registry(), b);
    EXPECT_EQ(r.trajectory.termination, "backend_failure");
    EXPECT_TRUE(r.answer.incomplete);
}

TEST(Run, RoutingMissStillExecutes) {
    auto b = doha({call_text("aqi_inquiry", {{"lat", "29.3759"}, {"lon", "47.9774"}, {"date", "2023-04-15"}}),
                   "AQI was 87 [1]."});
    auto r = run("air in Kuwait City", registry(), b);
    EXPECT_TRUE(r.trajectory.steps[0].routing_miss);
    EXPECT_TRUE(r.trajectory.steps[0].ok_observation());
    EXPECT_FALSE(r.answer.ungrounded);
}

TEST(Grounding, ClaimNumbers) {
    auto n = claim_numbers("On 2023-04-15 at 08:30 PM2.5 hit 41.5 [3] and AQI 87.");
    EXPECT_EQ(n, (std::vector<double>{41.5, 87.0}));
}

TEST(Grounding, QueryNumbersAndTolerance) {
    Trajectory t;
    t.query = "Rain over 3 days?";
    Step s;
    s.index = 1;
    s.kind = "tool_call";
    s.observation = toolkit::Observation{"x", json{{"value", 12.04}}, {}, {}, {}, {}, {}};
    t.steps.push_back(s);
    EXPECT_TRUE(check_grounding("Over 3 days, 12.04 mm fell.", t).ungrounded.empty());
    EXPECT_EQ(check_grounding("12.0 mm fell.", t).ungrounded.size(), 1u);
    EXPECT_TRUE(check_grounding("12.0 mm fell.", t, 0.01).ungrounded.empty());
    // a marker naming a missing step is discarded; grounding falls back to every ok step
    auto g = check_grounding("12.04 mm [9].", t);
    EXPECT_EQ(g.citations, std::vector<int>{1});
    EXPECT_TRUE(g.ungrounded.empty());
}

TEST(Observation, CappedMessageIsDeterministic) {
    toolkit::Observation o{"weather_analysis", json::object(), {}, {}, {}, {}, {}};
    for (int k = 0; k < 500; ++k) o.payload["k" + std::to_string(k)] = k;
    auto a = observation_message(o, 400);
    EXPECT_EQ(a, observation_message(o, 400));
    EXPECT_LE(a.size(), 600u);
    EXPECT_EQ(observation_message(o, 1 << 20), o.to_json().dump());
}

TEST(Charts, ForecastSeriesCharted) {
    auto b = doha({call_text("weather_forecast", {{"lat", "25.2854"}, {"lon", "51.5310"}, {"days", "3"}}),
                   "Temperatures hold steady [1]."});
    AgentOptions o;
    o.images = true;
    auto r = run("forecast for Doha", registry(), b, o);
    ASSERT_FALSE(r.answer.charts.empty());
    const auto& c = r.answer.charts.front();
    EXPECT_EQ(c.step, 1);
    EXPECT_EQ(c.start, "2023-04-16T00:00:00Z");
    EXPECT_EQ(c.svg.rfind("<svg", 0), 0u);
}
