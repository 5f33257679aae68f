#include "climagent/textforge/qa.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include "climagent/core/error.hpp"

namespace climagent::textforge {

using nlohmann::json;

namespace {

std::string norm(std::string_view s) {
    std::string out;
    bool space = false;
    for (char c : s) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            space = !out.empty();
            continue;
        }
        if (space) out.push_back(' ');
        space = false;
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    return out;
}

std::size_t word_count(std::string_view s) {
    std::istringstream in{std::string(s)};
    std::size_t n = 0;
    std::string w;
    while (in >> w) ++n;
    return n;
}

bool reject(std::string* why, std::string msg) {
    if (why) *why = std::move(msg);
    return false;
}

std::string answer_text(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number()) return v.dump();
    return {};
}

const char* format_instructions(QAFormat f) {
    switch (f) {
        case QAFormat::mcq:
            return "Write one multiple-choice question answerable from the evidence. Return JSON "
                   "{\"question\": str, \"options\": [str, ...], \"answer\": str}. Distractors must be "
                   "locally plausible but inconsistent with the evidence; the answer must be one of the options.";
        case QAFormat::open:
            return "Write one open-ended question with a concise, evidence-anchored answer. Return JSON "
                   "{\"question\": str, \"answer\": str}.";
        case QAFormat::tf:
            return "Write two true/false statements: one entailed by the evidence (answer true) and one "
                   "contradicted by it (answer false). Return a JSON array of {\"question\": str, \"answer\": bool}.";
    }
    return "";
}

}  // namespace

bool validate_qa_item(const QAItem& item, const QAOptions& options, std::string* why) {
    if (norm(item.question).empty()) return reject(why, "empty question");
    if (item.evidence.empty()) return reject(why, "no evidence");
    switch (item.format) {
        case QAFormat::mcq: {
            if (item.options.size() < options.min_mcq_options) return reject(why, "mcq needs at least 3 options");
            std::set<std::string> seen;
            for (const auto& o : item.options) {
                auto n = norm(o);
                if (n.empty()) return reject(why, "empty mcq option");
                if (!seen.insert(n).second) return reject(why, "duplicate mcq option");
            }
            auto hits = std::count(item.options.begin(), item.options.end(), item.answer);
            if (hits != 1) return reject(why, "mcq answer not among options");
            return true;
        }
        case QAFormat::tf:
            if (item.answer != "true" && item.answer != "false") return reject(why, "tf answer must be true/false");
            if (!item.options.empty()) return reject(why, "tf items carry no options");
            return true;
        case QAFormat::open:
            if (norm(item.answer).empty()) return reject(why, "empty open answer");
            if (word_count(item.answer) > options.open_answer_word_budget)
                return reject(why, "open answer exceeds word budget");
            return true;
    }
    return reject(why, "unknown format");
}

std::vector<QAItem> parse_generated_items(std::string_view text, QAFormat format) {
    // Generators often wrap JSON in prose or a code fence; take the outermost JSON value.
    auto first = text.find_first_of("[{");
    auto last = text.find_last_of("]}");
    if (first == std::string_view::npos || last == std::string_view::npos || last < first) return {};
    json j = json::parse(text.substr(first, last - first + 1), nullptr, false);
    if (j.is_discarded()) return {};
    if (j.is_object()) j = json::array({j});
    std::vector<QAItem> out;
    for (const auto& e : j) {
        if (!e.is_object() || !e.contains("question") || !e.contains("answer")) continue;
        QAItem q;
        q.format = format;
        q.question = e["question"].is_string() ? e["question"].get<std::string>() : "";
        q.answer = answer_text(e["answer"]);
        if (format == QAFormat::tf) {
            auto a = norm(q.answer);
            if (a == "true" || a == "false") q.answer = a;
        }
        if (e.contains("options") && e["options"].is_array())
            for (const auto& o : e["options"]) q.options.push_back(answer_text(o));
        out.push_back(std::move(q));
    }
    return out;
}

QASynthesis synthesize_qa(std::span<const AtomicFact> facts, QAFormat format, llm::Backend& backend,
                          const QAOptions& options) {
    if (facts.empty()) throw Error(ErrorCode::InvalidArgument, "synthesize_qa needs at least one fact");
    QASynthesis result;
    for (const auto& fact : facts) {
        llm::ChatRequest req;
        req.channel = "qa";
        req.messages = {
            {"system", std::string("You write exam items that are answerable from the given evidence only. ") +
                           format_instructions(format)},
            {"user", "Format: " + std::string(to_string(format)) + "\nEvidence:\n- " + fact.statement},
        };
        std::string emitted;
        try {
            emitted = backend.complete(req);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::BackendFailure) throw;
            throw Error(ErrorCode::BackendFailure, e.what());
        }
        auto items = parse_generated_items(emitted, format);
        if (items.empty()) {
            ++result.dropped;
            result.drop_reasons.push_back(fact.id + ": unparseable generation");
            continue;
        }
        std::vector<QAItem> valid;
        for (auto& q : items) {
            q.evidence = {fact.id};
            q.split = Split::text;
            std::string why;
            if (validate_qa_item(q, options, &why)) {
                valid.push_back(std::move(q));
            } else {
                ++result.dropped;
                result.drop_reasons.push_back(fact.id + ": " + why);
            }
        }
        if (format == QAFormat::tf) {
            auto t = std::find_if(valid.begin(), valid.end(), [](const QAItem& q) { return q.answer == "true"; });
            auto f = std::find_if(valid.begin(), valid.end(), [](const QAItem& q) { return q.answer == "false"; });
            if (t == valid.end() || f == valid.end()) {
                result.dropped += valid.size();
                result.drop_reasons.push_back(fact.id + ": tf batch lacks an entailed/contradicted pair");
                continue;
            }
            std::vector<QAItem> pair{*t, *f};
            result.dropped += valid.size() - 2;
            valid = std::move(pair);
        } else if (valid.size() > 1) {
            result.dropped += valid.size() - 1;
            valid.resize(1);
        }
        for (std::size_t k = 0; k < valid.size(); ++k) {
            valid[k].id = "text-" + std::string(to_string(format)) + "-" + fact.id + "-" + std::to_string(k);
            result.items.push_back(std::move(valid[k]));
        }
    }
    return result;
}

}  // namespace climagent::textforge
