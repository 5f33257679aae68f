#include "climagent/geoforge/visual_qa.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include <fmt/format.h>

#include "climagent/core/csv.hpp"
#include "climagent/core/error.hpp"

namespace climagent::geoforge {

using textforge::QAFormat;
using textforge::QAItem;

std::string_view to_string(VisualCategory c) {
    switch (c) {
        case VisualCategory::anomaly: return "anomaly";
        case VisualCategory::forecasting: return "forecasting";
        case VisualCategory::imputation: return "imputation";
        case VisualCategory::reasoning: return "reasoning";
    }
    return "anomaly";
}

std::optional<VisualCategory> parse_visual_category(std::string_view s) {
    for (auto c : {VisualCategory::anomaly, VisualCategory::forecasting, VisualCategory::imputation,
                   VisualCategory::reasoning})
        if (to_string(c) == s) return c;
    return std::nullopt;
}

namespace {

// Bounded draw that does not depend on the standard library's distribution
// implementation, so seeds reproduce across toolchains.
std::size_t draw(std::mt19937_64& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

std::uint64_t mix_seed(std::uint64_t seed, std::string_view id, std::string_view salt) {
    std::uint64_t h = 1469598103934665603ULL;
    for (char c : id) h = (h ^ static_cast<unsigned char>(c)) * 1099511628211ULL;
    for (char c : salt) h = (h ^ static_cast<unsigned char>(c)) * 1099511628211ULL;
    return h ^ (seed * 0x9E3779B97F4A7C15ULL);
}

std::vector<std::size_t> observed_indices(const core::CanonicalSeries& s) {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < s.size(); ++k)
        if (s[k].value) out.push_back(k);
    return out;
}

int day_of_window(const ChartArtifact& a, std::size_t index) {
    auto d = std::chrono::floor<std::chrono::days>(a.data[index].timestamp - a.window.start);
    return static_cast<int>(d.count()) + 1;
}

std::string day_label(const ChartArtifact& a, std::size_t index) {
    return fmt::format("day {} ({})", day_of_window(a, index),
                       core::format_date(std::chrono::floor<std::chrono::days>(a.data[index].timestamp)));
}

core::CanonicalSeries with_values(const core::CanonicalSeries& s,
                                  const std::vector<std::pair<std::size_t, std::optional<double>>>& edits) {
    auto records = s.records();
    for (const auto& [k, v] : edits) records.at(k).value = v;
    return core::CanonicalSeries(std::move(records));
}

std::string chart_scope(const ChartArtifact& a) {
    return fmt::format("{} in {} ({} to {})", a.metadata.variable, a.metadata.city, a.metadata.start.substr(0, 10),
                       a.metadata.end.substr(0, 10));
}

QAItem base_item(const ChartArtifact& a, VisualCategory cat, QAFormat format) {
    QAItem q;
    q.format = format;
    q.split = textforge::Split::visual;
    q.category = std::string(to_string(cat));
    q.evidence = {a.id};
    q.extra["chart"] = a.svg_filename();
    q.extra["data_ref"] = a.csv_filename();
    return q;
}

void finish(VisualQASynthesis& out, std::vector<QAItem> items, const ChartArtifact& a, VisualCategory cat,
            QAFormat format, const VisualQAOptions& opt) {
    for (std::size_t k = 0; k < items.size(); ++k) {
        items[k].id = fmt::format("visual-{}-{}-{}-s{}-{}", to_string(cat), textforge::to_string(format), a.id,
                                  opt.seed, k);
        std::string why;
        if (textforge::validate_qa_item(items[k], opt.validation, &why)) {
            out.qa.items.push_back(std::move(items[k]));
        } else {
            ++out.qa.dropped;
            out.qa.drop_reasons.push_back(items[k].id + ": " + why);
        }
    }
}

std::vector<QAItem> anomaly_items(const ChartArtifact& a, QAFormat format, const VisualQAOptions& opt,
                                  VisualQASynthesis& out) {
    auto plan = plan_anomaly(a, opt.spike_sigmas, opt.seed);
    std::string image = fmt::format("{}_anomaly_s{}.svg", a.id, opt.seed);
    auto perturbed = with_values(a.data, {{plan.index, plan.injected}});
    out.images.emplace_back(image, render_line_chart(perturbed, a.window.start, a.window.end,
                                                     "Perturbed: " + chart_scope(a),
                                                     fmt::format("{} ({})", a.metadata.variable, a.metadata.unit)));

    auto rng = std::mt19937_64(mix_seed(opt.seed, a.id, "anomaly-options"));
    auto observed = observed_indices(a.data);
    std::vector<std::size_t> others;
    for (auto k : observed)
        if (k != plan.index) others.push_back(k);
    std::vector<std::size_t> picks{plan.index};
    while (picks.size() < opt.mcq_options && !others.empty()) {
        auto at = draw(rng, others.size());
        picks.push_back(others[at]);
        others.erase(others.begin() + static_cast<std::ptrdiff_t>(at));
    }
    std::sort(picks.begin(), picks.end());

    const char* kind = plan.direction > 0 ? "spike" : "drop";
    auto annotate = [&](QAItem& q) {
        q.gold_value = plan.day;
        q.extra["image"] = image;
        q.extra["injected_index"] = plan.index;
        q.extra["injected_timestamp"] = core::format_iso(a.data[plan.index].timestamp);
        q.extra["direction"] = kind;
        q.extra["magnitude_sigmas"] = opt.spike_sigmas;
        q.extra["original_value"] = plan.original;
        q.extra["injected_value"] = plan.injected;
    };

    std::vector<QAItem> items;
    auto q = base_item(a, VisualCategory::anomaly, format);
    annotate(q);
    switch (format) {
        case QAFormat::mcq:
            q.question = fmt::format("The chart of {} contains one abnormal spike or drop. On which day does it occur?",
                                     chart_scope(a));
            for (auto k : picks) q.options.push_back(day_label(a, k));
            q.answer = day_label(a, plan.index);
            items.push_back(std::move(q));
            break;
        case QAFormat::open:
            q.question = fmt::format(
                "The chart of {} contains one abnormal point. On which day does it occur, and is it a spike or a drop?",
                chart_scope(a));
            q.answer = fmt::format("{}, {}", day_label(a, plan.index), kind);
            items.push_back(std::move(q));
            break;
        case QAFormat::tf: {
            q.question = fmt::format("In the chart of {}, the abnormal {} occurs on {}.", chart_scope(a), kind,
                                     day_label(a, plan.index));
            q.answer = "true";
            auto f = base_item(a, VisualCategory::anomaly, format);
            annotate(f);
            std::size_t wrong = picks.front() == plan.index && picks.size() > 1 ? picks[1] : picks.front();
            f.question = fmt::format("In the chart of {}, the abnormal {} occurs on {}.", chart_scope(a), kind,
                                     day_label(a, wrong));
            f.answer = "false";
            items.push_back(std::move(q));
            if (wrong != plan.index) items.push_back(std::move(f));
            break;
        }
    }
    return items;
}

std::vector<QAItem> imputation_items(const ChartArtifact& a, QAFormat format, const VisualQAOptions& opt,
                                     VisualQASynthesis& out) {
    auto span = plan_mask(a, opt.mask_fraction, opt.seed);
    std::string image = fmt::format("{}_masked_s{}.svg", a.id, opt.seed);
    std::vector<std::pair<std::size_t, std::optional<double>>> edits;
    for (auto k = span.first; k < span.last; ++k) edits.emplace_back(k, std::nullopt);
    out.images.emplace_back(image, render_line_chart(with_values(a.data, edits), a.window.start, a.window.end,
                                                     "Masked: " + chart_scope(a),
                                                     fmt::format("{} ({})", a.metadata.variable, a.metadata.unit)));

    const auto& unit = a.metadata.unit;
    auto from = day_label(a, span.first);
    auto to = day_label(a, span.last - 1);
    double step = std::max({2.0 * span.tolerance, 0.1 * std::fabs(span.gold_mean), 1.0});
    auto text = [&](double v) { return fmt::format("{:.3f} {}", v, unit); };
    auto annotate = [&](QAItem& q) {
        q.gold_value = span.gold_mean;
        q.tolerance = span.tolerance;
        q.extra["image"] = image;
        q.extra["masked_first"] = span.first;
        q.extra["masked_last"] = span.last;
    };

    std::vector<QAItem> items;
    auto q = base_item(a, VisualCategory::imputation, format);
    annotate(q);
    auto question = fmt::format("Values of {} are hidden from {} to {}. What is the mean of the hidden values?",
                                chart_scope(a), from, to);
    switch (format) {
        case QAFormat::mcq: {
            auto rng = std::mt19937_64(mix_seed(opt.seed, a.id, "imputation-options"));
            std::vector<int> offsets{-3, -2, -1, 1, 2, 3};
            std::vector<int> chosen{0};
            while (chosen.size() < opt.mcq_options && !offsets.empty()) {
                auto at = draw(rng, offsets.size());
                chosen.push_back(offsets[at]);
                offsets.erase(offsets.begin() + static_cast<std::ptrdiff_t>(at));
            }
            std::sort(chosen.begin(), chosen.end());
            q.question = question;
            for (int c : chosen) q.options.push_back(text(span.gold_mean + c * step));
            q.answer = text(span.gold_mean);
            items.push_back(std::move(q));
            break;
        }
        case QAFormat::open:
            q.question = question;
            q.answer = text(span.gold_mean);
            items.push_back(std::move(q));
            break;
        case QAFormat::tf: {
            q.question = fmt::format("Values of {} are hidden from {} to {}. Their mean is {}.", chart_scope(a), from,
                                     to, text(span.gold_mean));
            q.answer = "true";
            auto f = base_item(a, VisualCategory::imputation, format);
            annotate(f);
            f.question = fmt::format("Values of {} are hidden from {} to {}. Their mean is {}.", chart_scope(a), from,
                                     to, text(span.gold_mean + 3.0 * step));
            f.answer = "false";
            items.push_back(std::move(q));
            items.push_back(std::move(f));
            break;
        }
    }
    return items;
}

const char* generated_instructions(VisualCategory c) {
    return c == VisualCategory::forecasting
               ? "Ask about the likely continuation of the series just after the window, using only the trend and "
                 "statistics given."
               : "Ask a question that requires reasoning over the chart's statistics, trend and units.";
}

std::vector<QAItem> generated_items(const ChartArtifact& a, VisualCategory cat, QAFormat format,
                                    llm::Backend* backend, VisualQASynthesis& out) {
    if (!backend) throw Error(ErrorCode::BackendFailure, "visual QA category needs a backend");
    llm::ChatRequest req;
    req.channel = "visual_qa";
    req.messages = {
        {"system", std::string("You write questions about a climate time-series chart. ") +
                       generated_instructions(cat) +
                       " Return JSON {\"question\", \"answer\", \"options\"?}; true/false items come as an array of "
                       "an entailed and a contradicted statement."},
        {"user", fmt::format("Chart: {}\nCategory: {}\nFormat: {}\nMetadata: {}", a.id, to_string(cat),
                             textforge::to_string(format), a.metadata.to_json().dump())},
    };
    std::string emitted;
    try {
        emitted = backend->complete(req);
    } catch (const Error& e) {
        throw Error(ErrorCode::BackendFailure, e.what());
    }
    auto parsed = textforge::parse_generated_items(emitted, format);
    if (parsed.empty()) {
        ++out.qa.dropped;
        out.qa.drop_reasons.push_back(a.id + ": unparseable generation");
        return {};
    }
    std::vector<QAItem> items;
    for (auto& p : parsed) {
        auto q = base_item(a, cat, format);
        q.question = std::move(p.question);
        q.answer = std::move(p.answer);
        q.options = std::move(p.options);
        items.push_back(std::move(q));
    }
    if (format == QAFormat::tf) {
        auto t = std::find_if(items.begin(), items.end(), [](const QAItem& q) { return q.answer == "true"; });
        auto f = std::find_if(items.begin(), items.end(), [](const QAItem& q) { return q.answer == "false"; });
        if (t == items.end() || f == items.end()) {
            out.qa.dropped += items.size();
            out.qa.drop_reasons.push_back(a.id + ": tf batch lacks an entailed/contradicted pair");
            return {};
        }
        std::vector<QAItem> pair{*t, *f};
        out.qa.dropped += items.size() - 2;
        return pair;
    }
    if (items.size() > 1) {
        out.qa.dropped += items.size() - 1;
        items.resize(1);
    }
    return items;
}

}  // namespace

InjectedAnomaly plan_anomaly(const ChartArtifact& a, double k, std::uint64_t seed) {
    auto observed = observed_indices(a.data);
    if (observed.empty()) throw Error(ErrorCode::EmptySlice, "chart has no observed values");
    auto rng = std::mt19937_64(mix_seed(seed, a.id, "anomaly"));
    InjectedAnomaly plan;
    plan.index = observed[draw(rng, observed.size())];
    plan.day = day_of_window(a, plan.index);
    const auto& st = a.metadata.stats;
    plan.sigma = st.std > 1e-12 ? st.std : std::max(0.1 * std::fabs(st.mean), 1.0);
    plan.original = *a.data[plan.index].value;
    plan.direction = plan.original >= st.mean ? 1 : -1;
    plan.injected = plan.original + plan.direction * k * plan.sigma;
    return plan;
}

MaskedSpan plan_mask(const ChartArtifact& a, double fraction, std::uint64_t seed) {
    const std::size_t n = a.data.size();
    if (n == 0) throw Error(ErrorCode::EmptySlice, "chart has no records");
    if (!(fraction > 0.0 && fraction < 1.0)) throw Error(ErrorCode::InvalidArgument, "mask fraction must be in (0, 1)");
    const auto len = std::clamp<std::size_t>(static_cast<std::size_t>(std::lround(fraction * static_cast<double>(n))), 1, n);
    const std::size_t starts = n - len + 1;
    auto rng = std::mt19937_64(mix_seed(seed, a.id, "mask"));
    const auto offset = draw(rng, starts);
    for (std::size_t probe = 0; probe < starts; ++probe) {
        const std::size_t first = (offset + probe) % starts;
        std::vector<double> hidden;
        for (auto k = first; k < first + len; ++k)
            if (a.data[k].value) hidden.push_back(*a.data[k].value);
        if (hidden.empty()) continue;
        MaskedSpan span{first, first + len, core::summarize(hidden).mean, 0.0};
        std::vector<double> context;
        const std::size_t lo = first >= len ? first - len : 0;
        const std::size_t hi = std::min(n, first + 2 * len);
        for (auto k = lo; k < hi; ++k)
            if ((k < first || k >= first + len) && a.data[k].value) context.push_back(*a.data[k].value);
        span.tolerance = core::summarize(context).std;
        return span;
    }
    throw Error(ErrorCode::EmptySlice, "no mask position hides an observed value");
}

VisualQASynthesis synthesize_visual_qa(const ChartArtifact& artifact, VisualCategory category, QAFormat format,
                                       llm::Backend* backend, const VisualQAOptions& options) {
    VisualQASynthesis out;
    std::vector<QAItem> items;
    switch (category) {
        case VisualCategory::anomaly: items = anomaly_items(artifact, format, options, out); break;
        case VisualCategory::imputation: items = imputation_items(artifact, format, options, out); break;
        case VisualCategory::forecasting:
        case VisualCategory::reasoning: items = generated_items(artifact, category, format, backend, out); break;
    }
    finish(out, std::move(items), artifact, category, format, options);
    return out;
}

}  // namespace climagent::geoforge
