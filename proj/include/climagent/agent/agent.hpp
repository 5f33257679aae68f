#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "climagent/llm/backend.hpp"
#include "climagent/toolkit/call.hpp"
#include "climagent/toolkit/observation.hpp"
#include "climagent/toolkit/registry.hpp"

namespace climagent::agent {

enum class IntentLabel { textual, numerical, geospatial, health_environmental };

std::string_view to_string(IntentLabel l);
std::optional<IntentLabel> parse_intent_label(std::string_view s);
std::set<toolkit::Category> categories_for(IntentLabel l);

struct Intent {
    std::optional<IntentLabel> label;  // nullopt = fallback
    std::set<toolkit::Category> routed;

    nlohmann::json to_json() const;
};

/// Asks the backend ("route" channel) for the dominant intent. Unparseable
/// output or a backend failure routes to every category.
Intent route_intent(std::string_view query, llm::Backend& backend);

struct Step {
    int index = 0;  // 1-based
    std::string emission;
    std::string kind;  // tool_call | final_answer | format_error | backend_failure
    std::optional<toolkit::ToolCall> call;
    std::optional<std::string> final_text;
    std::string verdict;  // ok | format_error | unknown_tool | arg_error | backend_failure
    std::optional<toolkit::Observation> observation;
    bool routing_miss = false;

    bool ok_observation() const { return observation && observation->status.ok; }
    nlohmann::json to_json() const;
};

struct Trajectory {
    std::string query;
    Intent intent;
    int budget = 8;
    std::vector<Step> steps;
    /// final_answer | budget_exhausted | forced_termination | backend_failure
    std::string termination;

    bool complete() const { return termination == "final_answer"; }
    const Step* final_step() const;
    nlohmann::json to_json() const;
};

struct ChartRef {
    std::string id;
    int step = 0;
    std::string variable;
    std::string unit;
    std::string start;  // first plotted timestamp, ISO
    std::string end;    // last plotted timestamp, ISO
    std::string svg;

    nlohmann::json to_json() const;  // metadata only
};

struct AgentAnswer {
    std::string text;
    std::vector<int> citations;  // 1-based step indices
    std::vector<ChartRef> charts;
    bool incomplete = false;
    bool ungrounded = false;  // a numeric claim matched no cited observation
    std::vector<std::string> ungrounded_numbers;

    nlohmann::json to_json() const;
};

struct AgentOptions {
    int budget = 8;
    int max_consecutive_failures = 2;
    std::size_t observation_byte_cap = 4000;
    bool images = false;
    double numeric_tolerance = 1e-6;
};

struct RunResult {
    AgentAnswer answer;
    Trajectory trajectory;
};

/// Conversation text for one observation, summarized deterministically
/// when its JSON exceeds `byte_cap`.
std::string observation_message(const toolkit::Observation& obs, std::size_t byte_cap);

/// System prompt: category-grouped tool listing plus the call grammar.
std::string agent_system_prompt(const toolkit::ToolRegistry& routed);

/// act-observe-reason loop. Never throws for backend or tool failures; they
/// are recorded in the trajectory.
RunResult run(std::string_view query, const toolkit::ToolRegistry& registry, llm::Backend& backend,
              const AgentOptions& options = {});

struct GroundingReport {
    std::vector<int> citations;
    std::vector<std::string> ungrounded;
};

/// Numbers in `text` that are not citation markers, dates/times, parts of
/// identifiers (PM2.5) or copied from the query must match a numeric value
/// in a cited ok observation ([n] markers; every ok step when unmarked).
/// Numbers stated as claims in `text`: ISO dates, clock times, [n] markers and
/// digits glued to a preceding letter are skipped.
std::vector<double> claim_numbers(std::string_view text);

GroundingReport check_grounding(std::string_view text, const Trajectory& trajectory, double tolerance = 1e-6);

/// Answer text with citations, grounding flags and optional charts. Uses
/// the final answer when present, otherwise the "synthesize" channel.
/// Throws InvalidArgument on a trajectory with neither.
AgentAnswer synthesize(const Trajectory& trajectory, llm::Backend& backend, const AgentOptions& options = {});

/// Line charts of every series-bearing ok observation.
std::vector<ChartRef> charts_for(const Trajectory& trajectory);

}  // namespace climagent::agent
