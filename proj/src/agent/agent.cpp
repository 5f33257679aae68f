#include "climagent/agent/agent.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>

#include "climagent/core/csv.hpp"
#include "climagent/core/error.hpp"
#include "climagent/geoforge/chart.hpp"

namespace climagent::agent {

using nlohmann::json;
using toolkit::Category;

std::string_view to_string(IntentLabel l) {
    switch (l) {
        case IntentLabel::textual: return "textual";
        case IntentLabel::numerical: return "numerical";
        case IntentLabel::geospatial: return "geospatial";
        case IntentLabel::health_environmental: return "health_environmental";
    }
    return "textual";
}

std::optional<IntentLabel> parse_intent_label(std::string_view s) {
    for (auto l : {IntentLabel::textual, IntentLabel::numerical, IntentLabel::geospatial,
                   IntentLabel::health_environmental})
        if (to_string(l) == s) return l;
    return std::nullopt;
}

std::set<Category> categories_for(IntentLabel l) {
    switch (l) {
        case IntentLabel::textual: return {Category::web};
        case IntentLabel::health_environmental: return {Category::air_quality, Category::geospatial};
        case IntentLabel::numerical: return {Category::weather_hydrology, Category::carbon, Category::geospatial};
        case IntentLabel::geospatial: return {Category::remote_sensing, Category::biodiversity, Category::geospatial};
    }
    return {};
}

json Intent::to_json() const {
    json cats = json::array();
    for (auto c : toolkit::kCategoryOrder)
        if (routed.count(c)) cats.push_back(toolkit::to_string(c));
    return {{"label", label ? json(std::string(to_string(*label))) : json()}, {"routed_categories", cats}};
}

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

Intent fallback_intent() {
    Intent i;
    i.routed.insert(toolkit::kCategoryOrder.begin(), toolkit::kCategoryOrder.end());
    return i;
}

}  // namespace

Intent route_intent(std::string_view query, llm::Backend& backend) {
    if (query.find_first_not_of(" \t\r\n") == std::string_view::npos)
        throw Error(ErrorCode::InvalidArgument, "empty query");
    llm::ChatRequest req;
    req.channel = "route";
    req.messages = {
        {"system",
         "Classify the dominant intent of the user's climate question. Reply with JSON {\"intent\": L} where L is "
         "one of: textual (policy or event reporting), numerical (weather, rainfall, hydrology, emissions "
         "quantities), geospatial (land surface, imagery, species), health_environmental (air quality, UV, pollen)."},
        {"user", std::string(query)},
    };
    std::string reply;
    try {
        reply = backend.complete(req);
    } catch (const Error&) {
        return fallback_intent();
    }
    std::optional<IntentLabel> label;
    if (auto j = json::parse(reply, nullptr, false); !j.is_discarded() && j.is_object() && j.contains("intent") &&
                                                       j["intent"].is_string()) {
        label = parse_intent_label(lower(j["intent"].get<std::string>()));
    } else {
        // Bare label, possibly wrapped in prose: the earliest label mention wins.
        auto text = lower(reply);
        std::size_t best = std::string::npos;
        for (auto l : {IntentLabel::health_environmental, IntentLabel::textual, IntentLabel::numerical,
                       IntentLabel::geospatial}) {
            auto at = text.find(to_string(l));
            if (at != std::string::npos && (best == std::string::npos || at < best)) {
                best = at;
                label = l;
            }
        }
    }
    if (!label) return fallback_intent();
    return {label, categories_for(*label)};
}

json Step::to_json() const {
    json j{{"index", index}, {"kind", kind}, {"emission", emission}, {"verdict", verdict}};
    if (call) {
        json args = json::object();
        for (const auto& [k, v] : call->args) args[k] = v;
        j["call"] = {{"tool", call->tool}, {"args", args}};
    }
    if (final_text) j["final_answer"] = *final_text;
    if (observation) j["observation"] = observation->to_json();
    if (routing_miss) j["routing_miss"] = true;
    return j;
}

const Step* Trajectory::final_step() const {
    if (!steps.empty() && steps.back().final_text) return &steps.back();
    return nullptr;
}

json Trajectory::to_json() const {
    json s = json::array();
    for (const auto& st : steps) s.push_back(st.to_json());
    return {{"format", "trajectory/1"},
            {"query", query},
            {"intent", intent.to_json()},
            {"budget", budget},
            {"termination", termination},
            {"steps", s}};
}

json ChartRef::to_json() const {
    return {{"id", id}, {"step", step}, {"variable", variable}, {"unit", unit}, {"start", start}, {"end", end}};
}

json AgentAnswer::to_json() const {
    json charts_json = json::array();
    for (const auto& c : charts) charts_json.push_back(c.to_json());
    return {{"text", text},
            {"citations", citations},
            {"charts", charts_json},
            {"incomplete", incomplete},
            {"ungrounded", ungrounded},
            {"ungrounded_numbers", ungrounded_numbers}};
}

std::string observation_message(const toolkit::Observation& obs, std::size_t byte_cap) {
    auto full = obs.to_json().dump();
    if (full.size() <= byte_cap) return full;
    json summary{{"tool", obs.tool}, {"truncated", true}, {"bytes", full.size()}};
    summary["status"] = obs.status.ok ? json("ok") : json(obs.status.code);
    json fields = json::object();
    if (obs.payload.is_object()) {
        for (const auto& [k, v] : obs.payload.items()) {
            if (v.is_array()) fields[k] = "array[" + std::to_string(v.size()) + "]";
            else if (v.is_object()) fields[k] = v.contains("points") ? json("object with points") : v;
            else fields[k] = v;
        }
    }
    summary["payload"] = fields;
    auto text = summary.dump();
    if (text.size() > byte_cap) {
        summary.erase("payload");
        text = summary.dump();
    }
    return text;
}

std::string agent_system_prompt(const toolkit::ToolRegistry& routed) {
    return "You are a Gulf climate assistant. Use tools to gather evidence, one call per turn, then answer. "
           "Cite the step that produced each number with [n] markers.\n\n" +
           toolkit::render_tool_prompt(routed) + "\n" + toolkit::call_grammar_instructions();
}

RunResult run(std::string_view query, const toolkit::ToolRegistry& registry, llm::Backend& backend,
              const AgentOptions& options) {
    if (options.budget < 1) throw Error(ErrorCode::InvalidArgument, "budget must be at least 1");
    RunResult result;
    auto& traj = result.trajectory;
    traj.query = std::string(query);
    traj.budget = options.budget;
    traj.intent = route_intent(query, backend);

    auto routed = registry.restricted_to(traj.intent.routed);
    // Routing is advisory: an empty routed view would leave the model blind.
    const auto& prompt_registry = routed.empty() ? registry : routed;
    std::vector<llm::Message> messages{{"system", agent_system_prompt(prompt_registry)}, {"user", traj.query}};

    int consecutive_failures = 0;
    for (int t = 1; t <= options.budget; ++t) {
        Step step;
        step.index = t;
        llm::ChatRequest req{"agent", messages, t - 1};
        try {
            step.emission = backend.complete(req);
        } catch (const Error& e) {
            step.kind = "backend_failure";
            step.verdict = "backend_failure";
            step.observation = toolkit::Observation::failure("", "backend_failure", e.what());
            traj.steps.push_back(std::move(step));
            traj.termination = "backend_failure";
            break;
        }

        auto parsed = toolkit::parse_call(step.emission);
        if (auto* fin = std::get_if<toolkit::FinalAnswer>(&parsed)) {
            step.kind = "final_answer";
            step.verdict = "ok";
            step.final_text = fin->text;
            traj.steps.push_back(std::move(step));
            traj.termination = "final_answer";
            break;
        }
        messages.push_back({"assistant", step.emission});
        if (auto* bad = std::get_if<toolkit::FormatError>(&parsed)) {
            step.kind = "format_error";
            step.verdict = "format_error";
            step.observation = toolkit::Observation::failure("", "format_error", bad->reason);
            ++consecutive_failures;
        } else {
            const auto& call = std::get<toolkit::ToolCall>(parsed);
            step.kind = "tool_call";
            step.call = call;
            auto verdict = toolkit::validate_call(call, registry);
            step.verdict = std::string(toolkit::to_string(verdict.kind));
            if (verdict.ok()) {
                const auto* sig = registry.find(call.tool);
                step.routing_miss = !traj.intent.routed.count(sig->category);
                step.observation = toolkit::execute(call, registry);
                consecutive_failures = 0;
            } else {
                step.observation = toolkit::Observation::failure(call.tool, step.verdict, verdict.describe());
                ++consecutive_failures;
            }
        }
        messages.push_back({"tool", observation_message(*step.observation, options.observation_byte_cap)});
        traj.steps.push_back(std::move(step));
        if (consecutive_failures >= options.max_consecutive_failures) {
            traj.termination = "forced_termination";
            break;
        }
    }
    if (traj.termination.empty()) traj.termination = "budget_exhausted";

    bool any_ok = std::any_of(traj.steps.begin(), traj.steps.end(), [](const Step& s) { return s.ok_observation(); });
    if (traj.complete() || any_ok) {
        result.answer = synthesize(traj, backend, options);
    } else {
        result.answer.incomplete = true;
    }
    result.answer.incomplete = !traj.complete();
    return result;
}

namespace {

struct NumberToken {
    std::string text;
    double value;
};

bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

// Blanks ISO dates, clock times and [n] citation markers so their digits are
// not read as claims. Returns the citation indices found.
std::vector<int> strip_non_claims(std::string& s) {
    std::vector<int> cites;
    auto digit = [&](std::size_t k) { return k < s.size() && std::isdigit(static_cast<unsigned char>(s[k])); };
    for (std::size_t k = 0; k < s.size(); ++k) {
        if (s[k] == '[') {
            std::size_t e = k + 1;
            std::vector<int> inner;
            bool okay = digit(e);
            while (okay && e < s.size() && s[e] != ']') {
                std::size_t b = e;
                while (digit(e)) ++e;
                if (e == b) {
                    okay = false;
                    break;
                }
                inner.push_back(std::stoi(s.substr(b, e - b)));
                while (e < s.size() && (s[e] == ',' || s[e] == ' ')) ++e;
            }
            if (okay && e < s.size() && s[e] == ']') {
                cites.insert(cites.end(), inner.begin(), inner.end());
                std::fill(s.begin() + static_cast<std::ptrdiff_t>(k), s.begin() + static_cast<std::ptrdiff_t>(e + 1), ' ');
                k = e;
            }
            continue;
        }
        // YYYY-MM-DD with optional THH:MM[:SS][Z|+HH:MM]
        if (digit(k) && (k == 0 || !is_word_char(s[k - 1])) && digit(k + 1) && digit(k + 2) && digit(k + 3) &&
            k + 4 < s.size() && s[k + 4] == '-' && digit(k + 5) && digit(k + 6) && k + 7 < s.size() &&
            s[k + 7] == '-' && digit(k + 8) && digit(k + 9)) {
            std::size_t e = k + 10;
            if (e < s.size() && s[e] == 'T')
                while (e < s.size() && (digit(e) || s[e] == ':' || s[e] == 'T' || s[e] == 'Z' || s[e] == '+' ||
                                        (s[e] == '-' && digit(e + 1))))
                    ++e;
            std::fill(s.begin() + static_cast<std::ptrdiff_t>(k), s.begin() + static_cast<std::ptrdiff_t>(e), ' ');
            k = e;
            continue;
        }
        // HH:MM
        if (digit(k) && (k == 0 || !is_word_char(s[k - 1]))) {
            std::size_t e = k;
            while (digit(e)) ++e;
            if (e - k <= 2 && e < s.size() && s[e] == ':' && digit(e + 1) && digit(e + 2)) {
                std::size_t end = e + 3;
                if (end < s.size() && s[end] == ':' && digit(end + 1) && digit(end + 2)) end += 3;
                std::fill(s.begin() + static_cast<std::ptrdiff_t>(k), s.begin() + static_cast<std::ptrdiff_t>(end), ' ');
                k = end;
            }
        }
    }
    return cites;
}

std::vector<NumberToken> scan_numbers(std::string_view s) {
    std::vector<NumberToken> out;
    auto digit = [&](std::size_t k) { return k < s.size() && std::isdigit(static_cast<unsigned char>(s[k])); };
    std::size_t k = 0;
    while (k < s.size()) {
        bool sign = (s[k] == '-' || s[k] == '+') && digit(k + 1);
        if (!(digit(k) || sign) || (k > 0 && (is_word_char(s[k - 1]) || s[k - 1] == '.'))) {
            ++k;
            continue;
        }
        std::size_t b = k;
        if (sign) ++k;
        while (digit(k) || (s[k] == ',' && digit(k + 1) && digit(k + 2) && digit(k + 3) && !digit(k + 4))) ++k;
        if (k < s.size() && s[k] == '.' && digit(k + 1)) {
            ++k;
            while (digit(k)) ++k;
        }
        std::string text(s.substr(b, k - b));
        std::string plain;
        for (char c : text)
            if (c != ',') plain.push_back(c);
        if (plain.front() == '+') plain.erase(plain.begin());
        try {
            out.push_back({text, core::parse_double(plain)});
        } catch (const Error&) {
        }
    }
    return out;
}

void collect_numbers(const json& node, std::vector<double>& out) {
    if (node.is_number()) {
        out.push_back(node.get<double>());
    } else if (node.is_string()) {
        for (const auto& t : scan_numbers(node.get<std::string>())) out.push_back(t.value);
    } else if (node.is_structured()) {
        for (const auto& child : node) collect_numbers(child, out);
    }
}

bool close(double a, double b, double tol) {
    double d = std::fabs(a - b);
    return d <= tol || d <= tol * std::fabs(b);
}

}  // namespace

std::vector<double> claim_numbers(std::string_view text) {
    std::string work(text);
    strip_non_claims(work);
    std::vector<double> out;
    for (const auto& t : scan_numbers(work)) out.push_back(t.value);
    return out;
}

GroundingReport check_grounding(std::string_view text, const Trajectory& trajectory, double tolerance) {
    GroundingReport rep;
    std::string work(text);
    auto cited = strip_non_claims(work);
    auto is_ok_step = [&](int n) {
        return n >= 1 && n <= static_cast<int>(trajectory.steps.size()) && trajectory.steps[n - 1].ok_observation();
    };
    for (int n : cited)
        if (is_ok_step(n) && std::find(rep.citations.begin(), rep.citations.end(), n) == rep.citations.end())
            rep.citations.push_back(n);

    std::string query(trajectory.query);
    strip_non_claims(query);
    auto query_numbers = scan_numbers(query);

    auto claims = scan_numbers(work);
    std::vector<int> pool = rep.citations;
    if (pool.empty())
        for (const auto& s : trajectory.steps)
            if (s.ok_observation()) pool.push_back(s.index);

    std::map<int, std::vector<double>> values;
    for (int n : pool) collect_numbers(trajectory.steps[n - 1].observation->payload, values[n]);

    std::vector<int> auto_cited;
    for (const auto& c : claims) {
        if (std::any_of(query_numbers.begin(), query_numbers.end(),
                        [&](const NumberToken& q) { return q.value == c.value; }))
            continue;
        bool grounded = false;
        for (int n : pool) {
            const auto& v = values[n];
            if (std::any_of(v.begin(), v.end(), [&](double x) { return close(c.value, x, tolerance); })) {
                grounded = true;
                if (rep.citations.empty() || cited.empty())
                    if (std::find(auto_cited.begin(), auto_cited.end(), n) == auto_cited.end()) auto_cited.push_back(n);
                break;
            }
        }
        if (!grounded) rep.ungrounded.push_back(c.text);
    }
    if (rep.citations.empty()) {
        rep.citations = auto_cited;
        std::sort(rep.citations.begin(), rep.citations.end());
    }
    return rep;
}

std::vector<ChartRef> charts_for(const Trajectory& trajectory) {
    std::vector<ChartRef> out;
    for (const auto& s : trajectory.steps) {
        if (!s.ok_observation()) continue;
        const auto& p = s.observation->payload;
        std::vector<std::tuple<std::string, std::string, const json*>> sources;
        if (p.contains("series") && p["series"].is_object() && p["series"].contains("points") && p.contains("variable"))
            sources.emplace_back(p["variable"].get<std::string>(), p["unit"].get<std::string>(), &p["series"]["points"]);
        if (p.contains("series") && p["series"].is_array())
            for (const auto& e : p["series"])
                sources.emplace_back(e.at("variable").get<std::string>(), e.at("unit").get<std::string>(), &e.at("points"));
        for (const auto& [variable, unit, points] : sources) {
            if (points->empty()) continue;
            std::vector<core::CanonicalRecord> recs;
            for (const auto& pt : *points) {
                core::CanonicalRecord r;
                r.timestamp = core::normalize_timestamp(pt.at("time").get<std::string>());
                r.variable = variable;
                r.unit = unit;
                r.location = s.observation->location.value_or(core::GeoPoint(0.0, 0.0));
                r.source = s.observation->tool;
                if (pt.at("value").is_number()) r.value = pt["value"].get<double>();
                recs.push_back(std::move(r));
            }
            core::CanonicalSeries series(std::move(recs));
            if (series.values().empty()) continue;
            ChartRef c;
            c.id = "step" + std::to_string(s.index) + "-" + variable;
            c.step = s.index;
            c.variable = variable;
            c.unit = unit;
            c.start = core::format_iso(series.records().front().timestamp);
            c.end = core::format_iso(series.records().back().timestamp);
            auto end = series.records().back().timestamp + std::chrono::days(1);
            c.svg = geoforge::render_line_chart(series, series.records().front().timestamp, end,
                                                s.observation->tool + " | " + variable,
                                                variable + " (" + unit + ")");
            out.push_back(std::move(c));
        }
    }
    return out;
}

AgentAnswer synthesize(const Trajectory& trajectory, llm::Backend& backend, const AgentOptions& options) {
    bool any_ok =
        std::any_of(trajectory.steps.begin(), trajectory.steps.end(), [](const Step& s) { return s.ok_observation(); });
    const Step* fin = trajectory.final_step();
    if (!fin && !any_ok) throw Error(ErrorCode::InvalidArgument, "nothing to synthesize from");

    AgentAnswer ans;
    if (fin) {
        ans.text = *fin->final_text;
    } else {
        json evidence = json::array();
        for (const auto& s : trajectory.steps)
            if (s.ok_observation())
                evidence.push_back({{"step", s.index}, {"observation", observation_message(*s.observation, options.observation_byte_cap)}});
        llm::ChatRequest req;
        req.channel = "synthesize";
        req.messages = {{"system", "Answer the question using only the tool observations. Cite steps as [n]."},
                        {"user", trajectory.query},
                        {"user", "Observations: " + evidence.dump()}};
        try {
            ans.text = backend.complete(req);
        } catch (const Error&) {
            ans.text.clear();
        }
    }
    auto g = check_grounding(ans.text, trajectory, options.numeric_tolerance);
    ans.citations = std::move(g.citations);
    ans.ungrounded_numbers = std::move(g.ungrounded);
    ans.ungrounded = !ans.ungrounded_numbers.empty();
    ans.incomplete = !trajectory.complete();
    if (options.images) ans.charts = charts_for(trajectory);
    return ans;
}

}  // namespace climagent::agent
