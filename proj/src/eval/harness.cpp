#include "climagent/eval/harness.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "climagent/core/csv.hpp"
#include "climagent/core/error.hpp"

namespace climagent::eval {

using nlohmann::json;

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

bool contains_ci(std::string_view hay, std::string_view needle) {
    return lower(hay).find(lower(needle)) != std::string::npos;
}

bool within(double got, double expected, double tol) {
    double d = std::fabs(got - expected);
    if (expected == 0.0) return d <= tol;
    return d <= tol * std::fabs(expected);
}

[[noreturn]] void bad(std::string msg) { throw Error(ErrorCode::ParseError, std::move(msg)); }

std::string fact_phrase(const KeyFact& f) {
    if (f.number) return f.label + ": " + core::format_double(*f.number);
    if (f.text) return f.label + ": " + *f.text;
    return f.label;
}

}  // namespace

json KeyFact::to_json() const {
    json j{{"label", label}};
    if (number) j["value"] = *number;
    if (text) j["value"] = *text;
    if (tolerance != 1e-6) j["tolerance"] = tolerance;
    return j;
}

KeyFact KeyFact::from_json(const json& j) {
    if (!j.is_object() || !j.contains("label") || !j["label"].is_string()) bad("fact needs a string label");
    KeyFact f;
    f.label = j["label"].get<std::string>();
    if (f.label.empty()) bad("fact label is empty");
    if (j.contains("value")) {
        const auto& v = j["value"];
        if (v.is_number()) f.number = v.get<double>();
        else if (v.is_string()) f.text = v.get<std::string>();
        else if (!v.is_null()) bad("fact value must be a number or string");
    }
    if (j.contains("tolerance")) {
        if (!j["tolerance"].is_number() || j["tolerance"].get<double>() < 0) bad("fact tolerance must be >= 0");
        f.tolerance = j["tolerance"].get<double>();
    }
    return f;
}

bool fact_satisfied(const KeyFact& fact, std::string_view text) {
    if (!contains_ci(text, fact.label)) return false;
    if (fact.text && !contains_ci(text, *fact.text)) return false;
    if (fact.number) {
        auto nums = agent::claim_numbers(text);
        return std::any_of(nums.begin(), nums.end(), [&](double x) { return within(x, *fact.number, fact.tolerance); });
    }
    return true;
}

std::optional<toolkit::ToolCall> GoldStep::call() const {
    toolkit::ToolCall c;
    c.tool = tool;
    for (const auto& n : arg_names)
        if (!arg_values.count(n)) return std::nullopt;
    c.args = arg_values;
    return c;
}

json BenchmarkInstance::to_json() const {
    json trace = json::array();
    for (const auto& g : gold_trace) {
        json facts = json::array();
        for (const auto& f : g.summary_facts) facts.push_back(f.to_json());
        json values = json::object();
        for (const auto& [k, v] : g.arg_values) values[k] = v;
        trace.push_back({{"tool", g.tool}, {"arg_names", g.arg_names}, {"arg_values", values}, {"summary_facts", facts}});
    }
    json facts = json::array();
    for (const auto& f : answer_facts) facts.push_back(f.to_json());
    json j{{"id", id},
           {"query", query},
           {"allowed_tools", allowed_tools},
           {"gold_trace", trace},
           {"answer_facts", facts},
           {"requires_chart", requires_chart}};
    if (chart_variable) j["chart_variable"] = *chart_variable;
    return j;
}

BenchmarkInstance BenchmarkInstance::from_json(const json& j) {
    if (!j.is_object()) bad("instance must be an object");
    auto str = [&](const json& o, const char* key) {
        if (!o.contains(key) || !o[key].is_string()) bad(fmt::format("missing string field '{}'", key));
        return o[key].get<std::string>();
    };
    BenchmarkInstance inst;
    inst.id = str(j, "id");
    inst.query = str(j, "query");
    if (!j.contains("allowed_tools") || !j["allowed_tools"].is_array()) bad("allowed_tools must be an array");
    for (const auto& t : j["allowed_tools"]) {
        if (!t.is_string()) bad("allowed_tools entries must be strings");
        inst.allowed_tools.push_back(t.get<std::string>());
    }
    if (j.contains("gold_trace")) {
        if (!j["gold_trace"].is_array()) bad("gold_trace must be an array");
        for (const auto& g : j["gold_trace"]) {
            GoldStep s;
            s.tool = str(g, "tool");
            if (!g.contains("arg_names") || !g["arg_names"].is_array()) bad("gold step needs arg_names");
            for (const auto& n : g["arg_names"]) {
                if (!n.is_string()) bad("arg_names entries must be strings");
                s.arg_names.insert(n.get<std::string>());
            }
            if (g.contains("arg_values")) {
                if (!g["arg_values"].is_object()) bad("arg_values must be an object");
                for (const auto& [k, v] : g["arg_values"].items()) {
                    if (v.is_string()) s.arg_values[k] = v.get<std::string>();
                    else if (v.is_number_integer()) s.arg_values[k] = std::to_string(v.get<long long>());
                    else if (v.is_number()) s.arg_values[k] = core::format_double(v.get<double>());
                    else if (v.is_boolean()) s.arg_values[k] = v.get<bool>() ? "true" : "false";
                    else bad("arg_values must be scalars");
                }
            }
            if (g.contains("summary_facts"))
                for (const auto& f : g["summary_facts"]) s.summary_facts.push_back(KeyFact::from_json(f));
            inst.gold_trace.push_back(std::move(s));
        }
    }
    if (j.contains("answer_facts"))
        for (const auto& f : j["answer_facts"]) inst.answer_facts.push_back(KeyFact::from_json(f));
    if (j.contains("requires_chart")) {
        if (!j["requires_chart"].is_boolean()) bad("requires_chart must be boolean");
        inst.requires_chart = j["requires_chart"].get<bool>();
    }
    if (j.contains("chart_variable") && !j["chart_variable"].is_null()) inst.chart_variable = str(j, "chart_variable");
    return inst;
}

void validate_instance(const BenchmarkInstance& inst, const toolkit::ToolRegistry* registry) {
    auto fail = [&](const std::string& m) { throw Error(ErrorCode::InvalidArgument, "instance " + inst.id + ": " + m); };
    if (inst.id.empty()) throw Error(ErrorCode::InvalidArgument, "instance id is empty");
    if (inst.query.empty()) fail("query is empty");
    if (!inst.allowed_tools.empty() && inst.gold_trace.empty()) fail("gold_trace is empty but tools are allowed");
    std::set<std::string> allowed(inst.allowed_tools.begin(), inst.allowed_tools.end());
    for (const auto& g : inst.gold_trace) {
        if (!allowed.count(g.tool)) fail("gold tool " + g.tool + " is not in allowed_tools");
        for (const auto& [k, v] : g.arg_values)
            if (!g.arg_names.count(k) && registry && registry->find(g.tool) && !registry->find(g.tool)->param(k))
                fail("arg value for unknown parameter " + k);
    }
    if (inst.chart_variable && !inst.requires_chart) fail("chart_variable given without requires_chart");
    if (!registry) return;
    for (const auto& t : inst.allowed_tools)
        if (!registry->find(t)) fail("allowed tool " + t + " is not registered");
    for (const auto& g : inst.gold_trace) {
        auto req = registry->find(g.tool)->required_params();
        if (std::set<std::string>(req.begin(), req.end()) != g.arg_names)
            fail("arg_names of " + g.tool + " differ from its required parameters");
    }
}

std::vector<BenchmarkInstance> parse_instances(std::string_view text) {
    std::vector<BenchmarkInstance> out;
    std::set<std::string> ids;
    std::istringstream in{std::string(text)};
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto j = json::parse(line, nullptr, false);
        if (j.is_discarded()) bad(fmt::format("line {}: not valid JSON", n));
        try {
            auto inst = BenchmarkInstance::from_json(j);
            validate_instance(inst);
            if (!ids.insert(inst.id).second) bad("duplicate id " + inst.id);
            out.push_back(std::move(inst));
        } catch (const Error& e) {
            bad(fmt::format("line {}: {}", n, e.what()));
        }
    }
    return out;
}

std::vector<BenchmarkInstance> load_instances(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::ConfigError, "cannot read " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_instances(ss.str());
}

std::string_view to_string(StepError e) {
    switch (e) {
        case StepError::none: return "none";
        case StepError::format_err: return "format_err";
        case StepError::arg_err: return "arg_err";
        case StepError::na: return "na";
    }
    return "none";
}

PredictedStep PredictedStep::from_emission(std::string emission, const toolkit::ToolRegistry& registry) {
    PredictedStep p;
    p.parsed = toolkit::parse_call(emission);
    p.emission = std::move(emission);
    if (const auto* c = std::get_if<toolkit::ToolCall>(&p.parsed)) p.verdict = toolkit::validate_call(*c, registry);
    return p;
}

StepScore score_step(const PredictedStep& predicted, const GoldStep& gold) {
    StepScore s;
    const auto* call = std::get_if<toolkit::ToolCall>(&predicted.parsed);
    // Gold positions always require a call, so a final answer is not legal here.
    if (!call) return s;
    s.inst = 1;
    s.tool = call->tool == gold.tool;
    std::set<std::string> names;
    for (const auto& [k, v] : call->args) names.insert(k);
    s.arg = names == gold.arg_names;
    s.summ = std::all_of(gold.summary_facts.begin(), gold.summary_facts.end(),
                         [&](const KeyFact& f) { return fact_satisfied(f, predicted.summary); });
    return s;
}

StepError classify_error(const PredictedStep& predicted, const GoldStep& gold) {
    if (std::holds_alternative<toolkit::FormatError>(predicted.parsed)) return StepError::format_err;
    if (std::holds_alternative<toolkit::FinalAnswer>(predicted.parsed)) return StepError::na;
    const auto& call = std::get<toolkit::ToolCall>(predicted.parsed);
    if (predicted.verdict && !predicted.verdict->ok()) return StepError::arg_err;
    if (call.tool == gold.tool) {
        std::set<std::string> names;
        for (const auto& [k, v] : call.args) names.insert(k);
        if (names != gold.arg_names) return StepError::arg_err;
    }
    return StepError::none;
}

void MetricReport::aggregate() {
    inst_acc = tool_acc = arg_acc = summ_acc = ans_acc = ans_acc_i = std::nullopt;
    error_rates.reset();
    if (mode == "step") {
        long total = 0, inst = 0, tool = 0, arg = 0, summ = 0, f = 0, a = 0, na = 0;
        for (const auto& row : per_instance)
            for (const auto& s : row.steps) {
                ++total;
                inst += s.score.inst;
                tool += s.score.tool;
                arg += s.score.arg;
                summ += s.score.summ;
                f += s.error == StepError::format_err;
                a += s.error == StepError::arg_err;
                na += s.error == StepError::na;
            }
        if (total == 0) return;
        auto pct = [&](long k) { return 100.0 * static_cast<double>(k) / static_cast<double>(total); };
        inst_acc = pct(inst);
        tool_acc = pct(tool);
        arg_acc = pct(arg);
        summ_acc = pct(summ);
        error_rates = ErrorRates{pct(f), pct(a), pct(na)};
    } else {
        long n = 0, ans = 0, ni = 0, ansi = 0;
        for (const auto& row : per_instance) {
            ++n;
            ans += row.ans.value_or(0);
            if (row.ans_i) {
                ++ni;
                ansi += *row.ans_i;
            }
        }
        if (n > 0) ans_acc = 100.0 * static_cast<double>(ans) / static_cast<double>(n);
        if (ni > 0) ans_acc_i = 100.0 * static_cast<double>(ansi) / static_cast<double>(ni);
    }
}

std::string summary_request_text(const BenchmarkInstance& inst, std::size_t step, const std::string& observation) {
    return fmt::format("Step {} of {}: {}\nObservation: {}", step, inst.id, inst.gold_trace.at(step - 1).tool,
                       observation);
}

namespace {

toolkit::ToolRegistry instance_registry(const BenchmarkInstance& inst, const toolkit::ToolRegistry& registry) {
    return registry.subset(std::set<std::string>(inst.allowed_tools.begin(), inst.allowed_tools.end()));
}

void require_instances(const std::vector<BenchmarkInstance>& instances) {
    if (instances.empty()) throw Error(ErrorCode::InvalidArgument, "no benchmark instances");
}

InstanceRow step_instance(const BenchmarkInstance& inst, llm::Backend& backend, const toolkit::ToolRegistry& registry,
                          const HarnessOptions& options) {
    InstanceRow row;
    row.id = inst.id;
    auto zero_rows = [&](const std::string& why) {
        row.failure = why;
        row.steps.clear();
        for (std::size_t k = 0; k < inst.gold_trace.size(); ++k)
            row.steps.push_back({static_cast<int>(k + 1), inst.gold_trace[k].tool, "", {}, StepError::none});
    };
    try {
        validate_instance(inst, &registry);
    } catch (const Error& e) {
        zero_rows(e.what());
        return row;
    }
    auto reg = instance_registry(inst, registry);

    // Gold observations under teacher forcing are computed once, in order.
    std::vector<toolkit::Observation> gold_obs;
    for (const auto& g : inst.gold_trace) {
        auto call = g.call();
        gold_obs.push_back(call ? toolkit::execute(*call, reg)
                                : toolkit::Observation::failure(g.tool, "invalid_argument", "gold arguments unspecified"));
    }

    std::vector<llm::Message> context{{"system", agent::agent_system_prompt(reg)}, {"user", inst.query}};
    for (std::size_t k = 0; k < inst.gold_trace.size(); ++k) {
        const auto& gold = inst.gold_trace[k];
        std::string emission;
        std::string failure;
        try {
            emission = backend.complete({"agent", context, static_cast<int>(k)});
        } catch (const Error& e) {
            failure = fmt::format("step {}: {}", k + 1, e.what());
        }
        auto pred = PredictedStep::from_emission(emission, reg);

        auto obs_text = agent::observation_message(gold_obs[k], options.agent.observation_byte_cap);
        llm::ChatRequest sreq;
        sreq.channel = "summary";
        sreq.turn = static_cast<int>(k);
        sreq.messages = {{"system", "Summarize the tool observation in one or two sentences. State key values with "
                                    "their units exactly as observed."},
                         {"user", inst.query},
                         {"user", summary_request_text(inst, k + 1, obs_text)}};
        try {
            pred.summary = backend.complete(sreq);
        } catch (const Error& e) {
            if (failure.empty()) failure = fmt::format("step {} summary: {}", k + 1, e.what());
        }
        if (!failure.empty() && row.failure.empty()) row.failure = failure;

        StepRow sr;
        sr.index = static_cast<int>(k + 1);
        sr.gold_tool = gold.tool;
        if (const auto* c = std::get_if<toolkit::ToolCall>(&pred.parsed)) sr.predicted_tool = c->tool;
        sr.score = score_step(pred, gold);
        sr.error = classify_error(pred, gold);
        row.steps.push_back(sr);

        auto gold_call = gold.call();
        context.push_back({"assistant", gold_call ? toolkit::serialize_call(*gold_call) : std::string()});
        context.push_back({"tool", obs_text});
    }
    return row;
}

bool chart_matches(const BenchmarkInstance& inst, const std::vector<agent::ChartRef>& charts) {
    return std::any_of(charts.begin(), charts.end(), [&](const agent::ChartRef& c) {
        if (inst.chart_variable) return lower(c.variable) == lower(*inst.chart_variable);
        return std::any_of(inst.answer_facts.begin(), inst.answer_facts.end(),
                           [&](const KeyFact& f) { return contains_ci(f.label, c.variable); });
    });
}

InstanceRow e2e_instance(const BenchmarkInstance& inst, llm::Backend& backend, const toolkit::ToolRegistry& registry,
                         const HarnessOptions& options) {
    InstanceRow row;
    row.id = inst.id;
    row.ans = 0;
    if (options.images) row.ans_i = 0;
    try {
        validate_instance(inst, &registry);
        auto opts = options.agent;
        opts.images = options.images;
        auto result = agent::run(inst.query, instance_registry(inst, registry), backend, opts);
        const auto& text = result.answer.text;
        bool ok = std::all_of(inst.answer_facts.begin(), inst.answer_facts.end(),
                              [&](const KeyFact& f) { return fact_satisfied(f, text); });
        row.ans = ok;
        if (options.images) row.ans_i = ok && (!inst.requires_chart || chart_matches(inst, result.answer.charts));
        if (!result.trajectory.complete()) row.failure = "terminated: " + result.trajectory.termination;
    } catch (const Error& e) {
        row.failure = e.what();
    }
    return row;
}

}  // namespace

MetricReport run_step_mode(const std::vector<BenchmarkInstance>& instances, llm::Backend& backend,
                           const toolkit::ToolRegistry& registry, const HarnessOptions& options) {
    require_instances(instances);
    MetricReport rep;
    rep.mode = "step";
    for (const auto& inst : instances) rep.per_instance.push_back(step_instance(inst, backend, registry, options));
    rep.aggregate();
    return rep;
}

MetricReport run_e2e_mode(const std::vector<BenchmarkInstance>& instances, llm::Backend& backend,
                          const toolkit::ToolRegistry& registry, const HarnessOptions& options) {
    require_instances(instances);
    MetricReport rep;
    rep.mode = "e2e";
    for (const auto& inst : instances) rep.per_instance.push_back(e2e_instance(inst, backend, registry, options));
    rep.aggregate();
    return rep;
}

namespace {

std::string pct_cell(const std::optional<double>& v) { return v ? fmt::format("{:.1f}", *v) : std::string("-"); }

struct Counts {
    int steps = 0, inst = 0, tool = 0, arg = 0, summ = 0, f = 0, a = 0, na = 0;
};

Counts count(const InstanceRow& row) {
    Counts c;
    for (const auto& s : row.steps) {
        ++c.steps;
        c.inst += s.score.inst;
        c.tool += s.score.tool;
        c.arg += s.score.arg;
        c.summ += s.score.summ;
        c.f += s.error == StepError::format_err;
        c.a += s.error == StepError::arg_err;
        c.na += s.error == StepError::na;
    }
    return c;
}

std::string opt_int(const std::optional<int>& v) { return v ? std::to_string(*v) : std::string(); }

}  // namespace

std::string render_report(const MetricReport& r) {
    std::string out;
    out += fmt::format("mode {}\n", r.mode);
    out += fmt::format("{:<10}{:>9}{:>9}{:>9}{:>9}{:>9}{:>9}\n", "", "InstAcc", "ToolAcc", "ArgAcc", "SummAcc", "AnsAcc",
                       "AnsAcc+I");
    out += fmt::format("{:<10}{:>9}{:>9}{:>9}{:>9}{:>9}{:>9}\n", "overall", pct_cell(r.inst_acc), pct_cell(r.tool_acc),
                       pct_cell(r.arg_acc), pct_cell(r.summ_acc), pct_cell(r.ans_acc), pct_cell(r.ans_acc_i));
    out += fmt::format("{:<10}{:>9}{:>9}{:>9}\n", "", "Format%", "Arg%", "N/A%");
    if (r.error_rates)
        out += fmt::format("{:<10}{:>9.1f}{:>9.1f}{:>9.1f}\n", "errors", r.error_rates->format_pct,
                           r.error_rates->arg_pct, r.error_rates->na_pct);
    else
        out += fmt::format("{:<10}{:>9}{:>9}{:>9}\n", "errors", "-", "-", "-");
    out += "\n";
    out += fmt::format("{:<16}{:>6}{:>6}{:>6}{:>6}{:>6}{:>6}{:>6}{:>6}{:>6}{:>6}  {}\n", "instance", "steps", "inst",
                       "tool", "arg", "summ", "fmt", "argE", "n/a", "ans", "ans+I", "note");
    for (const auto& row : r.per_instance) {
        auto c = count(row);
        out += fmt::format("{:<16}{:>6}{:>6}{:>6}{:>6}{:>6}{:>6}{:>6}{:>6}{:>6}{:>6}  {}\n", row.id, c.steps, c.inst,
                           c.tool, c.arg, c.summ, c.f, c.a, c.na, opt_int(row.ans), opt_int(row.ans_i), row.failure);
    }
    return out;
}

std::string report_csv(const MetricReport& r) {
    std::string out = "# metric-report/1 mode=" + r.mode + "\n";
    out += "instance,steps,inst,tool,arg,summ,format_err,arg_err,na,ans,ans_i,failure\n";
    Counts total;
    int ans = 0, ansi = 0;
    for (const auto& row : r.per_instance) {
        auto c = count(row);
        total.steps += c.steps;
        total.inst += c.inst;
        total.tool += c.tool;
        total.arg += c.arg;
        total.summ += c.summ;
        total.f += c.f;
        total.a += c.a;
        total.na += c.na;
        ans += row.ans.value_or(0);
        ansi += row.ans_i.value_or(0);
        out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{}\n", core::escape_csv_field(row.id), c.steps, c.inst,
                           c.tool, c.arg, c.summ, c.f, c.a, c.na, opt_int(row.ans), opt_int(row.ans_i),
                           core::escape_csv_field(row.failure));
    }
    if (!r.per_instance.empty())
        out += fmt::format("TOTAL,{},{},{},{},{},{},{},{},{},{},\n", total.steps, total.inst, total.tool, total.arg,
                           total.summ, total.f, total.a, total.na, ans, ansi);
    return out;
}

void write_report(const MetricReport& report, const std::filesystem::path& stem) {
    auto put = [](const std::filesystem::path& p, const std::string& body) {
        std::ofstream out(p, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::SinkFailure, "cannot write " + p.string());
        out << body;
        if (!out) throw Error(ErrorCode::SinkFailure, "write failed for " + p.string());
    };
    auto txt = stem;
    txt += ".txt";
    auto csv = stem;
    csv += ".csv";
    put(txt, render_report(report));
    put(csv, report_csv(report));
}

llm::ScriptedBackend make_gold_replay(const std::vector<BenchmarkInstance>& instances) {
    // Longer queries first so a query that contains another still selects its own script.
    std::vector<const BenchmarkInstance*> order;
    for (const auto& i : instances) order.push_back(&i);
    std::stable_sort(order.begin(), order.end(),
                     [](const auto* a, const auto* b) { return a->query.size() > b->query.size(); });
    llm::ScriptedBackend backend;
    for (const auto* inst : order) {
        llm::ScriptedBackend::Script agent_script{"agent", inst->query, {}, false};
        llm::ScriptedBackend::Script summary_script{"summary", inst->query, {}, false};
        for (const auto& g : inst->gold_trace) {
            auto call = g.call();
            if (!call) throw Error(ErrorCode::InvalidArgument, "gold step of " + inst->id + " lacks argument values");
            agent_script.emissions.push_back(toolkit::serialize_call(*call));
            std::string summary;
            for (const auto& f : g.summary_facts) summary += (summary.empty() ? "" : "; ") + fact_phrase(f);
            summary_script.emissions.push_back(summary.empty() ? g.tool + " returned its result." : summary + ".");
        }
        std::string answer;
        for (const auto& f : inst->answer_facts) answer += (answer.empty() ? "" : "; ") + fact_phrase(f);
        agent_script.emissions.push_back(answer.empty() ? std::string("Done.") : answer + ".");
        backend.add(std::move(agent_script));
        if (!summary_script.emissions.empty()) backend.add(std::move(summary_script));
    }
    return backend;
}

}  // namespace climagent::eval
