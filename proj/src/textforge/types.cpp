#include "climagent/textforge/types.hpp"

#include "climagent/core/error.hpp"

namespace climagent::textforge {

using nlohmann::json;

std::string Chunk::text() const {
    std::string out;
    for (const auto& t : tokens) {
        if (!out.empty()) out.push_back(' ');
        out += t;
    }
    return out;
}

std::string_view to_string(QAFormat f) {
    switch (f) {
        case QAFormat::mcq: return "mcq";
        case QAFormat::open: return "open";
        case QAFormat::tf: return "tf";
    }
    return "?";
}

std::optional<QAFormat> parse_qa_format(std::string_view s) {
    if (s == "mcq") return QAFormat::mcq;
    if (s == "open") return QAFormat::open;
    if (s == "tf") return QAFormat::tf;
    return std::nullopt;
}

std::string_view to_string(Split s) { return s == Split::text ? "text" : "visual"; }

json QAItem::to_json() const {
    json j{{"id", id},
           {"format", std::string(climagent::textforge::to_string(format))},
           {"question", question},
           {"answer", answer},
           {"evidence", evidence},
           {"split", std::string(climagent::textforge::to_string(split))},
           {"review_flag", review_flag}};
    if (format == QAFormat::mcq) j["options"] = options;
    if (!category.empty()) j["category"] = category;
    if (gold_value) j["gold_value"] = *gold_value;
    if (tolerance) j["tolerance"] = *tolerance;
    if (!extra.empty()) j["extra"] = extra;
    return j;
}

QAItem QAItem::from_json(const json& j) {
    QAItem q;
    q.id = j.at("id").get<std::string>();
    auto fmt = parse_qa_format(j.at("format").get<std::string>());
    if (!fmt) throw Error(ErrorCode::ParseError, "unknown QA format");
    q.format = *fmt;
    q.question = j.at("question").get<std::string>();
    q.answer = j.at("answer").get<std::string>();
    q.options = j.value("options", std::vector<std::string>{});
    q.evidence = j.value("evidence", std::vector<std::string>{});
    q.split = j.value("split", "text") == "visual" ? Split::visual : Split::text;
    q.category = j.value("category", "");
    if (j.contains("gold_value")) q.gold_value = j["gold_value"].get<double>();
    if (j.contains("tolerance")) q.tolerance = j["tolerance"].get<double>();
    q.review_flag = j.value("review_flag", false);
    q.extra = j.value("extra", json::object());
    return q;
}

json to_json(const core::Provenance& p) {
    json j{{"query", p.query}, {"retrieved_at", core::format_iso(p.retrieved_at)}};
    if (p.url) j["url"] = *p.url;
    if (p.title) j["title"] = *p.title;
    if (p.organization) j["organization"] = *p.organization;
    if (p.published) j["published"] = *p.published;
    if (!p.trace.empty()) j["trace"] = p.trace;
    return j;
}

core::Provenance provenance_from_json(const json& j) {
    core::Provenance p;
    if (j.contains("url")) p.url = j["url"].get<std::string>();
    if (j.contains("title")) p.title = j["title"].get<std::string>();
    if (j.contains("organization")) p.organization = j["organization"].get<std::string>();
    if (j.contains("published")) p.published = j["published"].get<std::string>();
    p.query = j.value("query", "");
    p.retrieved_at = core::normalize_timestamp(j.at("retrieved_at").get<std::string>());
    p.trace = j.value("trace", std::vector<std::string>{});
    return p;
}

}  // namespace climagent::textforge
