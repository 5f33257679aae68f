#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "climagent/agent/agent.hpp"
#include "climagent/llm/backend.hpp"
#include "climagent/toolkit/call.hpp"
#include "climagent/toolkit/observation.hpp"
#include "climagent/toolkit/registry.hpp"

namespace climagent::eval {

/// A checkable assertion: `label` must occur in the text (case-insensitive);
/// a numeric expectation must appear as a stated number within tolerance,
/// a text expectation must occur verbatim (case-insensitive).
struct KeyFact {
    std::string label;
    std::optional<double> number;
    std::optional<std::string> text;
    double tolerance = 1e-6;  // relative; absolute when the expected value is 0

    nlohmann::json to_json() const;
    static KeyFact from_json(const nlohmann::json& j);
};

bool fact_satisfied(const KeyFact& fact, std::string_view text);

struct GoldStep {
    std::string tool;
    std::set<std::string> arg_names;
    std::map<std::string, std::string> arg_values;
    std::vector<KeyFact> summary_facts;

    /// The gold call, when every required name has a value.
    std::optional<toolkit::ToolCall> call() const;
};

struct BenchmarkInstance {
    std::string id;
    std::string query;
    std::vector<std::string> allowed_tools;
    std::vector<GoldStep> gold_trace;
    std::vector<KeyFact> answer_facts;
    bool requires_chart = false;
    std::optional<std::string> chart_variable;

    nlohmann::json to_json() const;
    static BenchmarkInstance from_json(const nlohmann::json& j);
};

/// Structural checks, plus registry checks when one is given: gold tools are
/// allowed and known, and arg_names equal the signature's required params.
void validate_instance(const BenchmarkInstance& inst, const toolkit::ToolRegistry* registry = nullptr);

/// One JSON object per line; blank lines skipped. Throws ParseError with
/// the offending line number.
std::vector<BenchmarkInstance> parse_instances(std::string_view text);
std::vector<BenchmarkInstance> load_instances(const std::filesystem::path& path);

enum class StepError { none, format_err, arg_err, na };
std::string_view to_string(StepError e);

struct StepScore {
    int inst = 0, tool = 0, arg = 0, summ = 0;
};

/// A predicted emission at one aligned position.
struct PredictedStep {
    std::string emission;
    toolkit::ParsedEmission parsed;
    std::optional<toolkit::ValidationVerdict> verdict;  // set for tool calls
    std::string summary;                                 // step summary text

    static PredictedStep from_emission(std::string emission, const toolkit::ToolRegistry& registry);
};

StepScore score_step(const PredictedStep& predicted, const GoldStep& gold);
StepError classify_error(const PredictedStep& predicted, const GoldStep& gold);

struct StepRow {
    int index = 0;  // 1-based gold position
    std::string gold_tool;
    std::string predicted_tool;
    StepScore score;
    StepError error = StepError::none;
};

struct InstanceRow {
    std::string id;
    std::vector<StepRow> steps;
    std::optional<int> ans;
    std::optional<int> ans_i;
    std::string failure;  // non-empty when the instance could not be evaluated
};

struct ErrorRates {
    double format_pct = 0, arg_pct = 0, na_pct = 0;
};

struct MetricReport {
    std::string mode;  // step | e2e
    std::optional<double> inst_acc, tool_acc, arg_acc, summ_acc;
    std::optional<ErrorRates> error_rates;
    std::optional<double> ans_acc, ans_acc_i;
    std::vector<InstanceRow> per_instance;

    /// Recomputes headline numbers from per_instance.
    void aggregate();
};

struct HarnessOptions {
    agent::AgentOptions agent;
    bool images = false;
};

MetricReport run_step_mode(const std::vector<BenchmarkInstance>& instances, llm::Backend& backend,
                           const toolkit::ToolRegistry& registry, const HarnessOptions& options = {});
MetricReport run_e2e_mode(const std::vector<BenchmarkInstance>& instances, llm::Backend& backend,
                          const toolkit::ToolRegistry& registry, const HarnessOptions& options = {});

/// Fixed-column text table.
std::string render_report(const MetricReport& report);
/// "metric-report/1" CSV: one row per instance, then a TOTAL row.
std::string report_csv(const MetricReport& report);
/// Writes <stem>.txt and <stem>.csv; throws SinkFailure.
void write_report(const MetricReport& report, const std::filesystem::path& stem);

/// Scripted replay of a perfect agent: gold calls then a final answer
/// stating every answer fact, plus gold-fact summaries per step.
llm::ScriptedBackend make_gold_replay(const std::vector<BenchmarkInstance>& instances);

/// The exact user message used for summary requests in step mode.
std::string summary_request_text(const BenchmarkInstance& inst, std::size_t step, const std::string& observation);

}  // namespace climagent::eval
