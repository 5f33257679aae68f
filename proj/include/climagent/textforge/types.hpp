#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "climagent/core/types.hpp"

namespace climagent::textforge {

struct Keyword {
    std::string text;
    std::vector<double> embedding;
    std::optional<std::string> country;
    std::optional<std::string> city;
};

struct Document {
    std::string id;
    std::string clean_text;
    core::Provenance provenance;
};

struct Chunk {
    std::string id;  // "<doc_id>#<m>"
    std::string doc_id;
    std::size_t start = 0;
    std::vector<std::string> tokens;
    std::vector<std::string> section_path;
    core::Provenance provenance;

    std::string text() const;
};

struct AtomicFact {
    std::string id;
    std::string statement;
    std::string chunk_ref;
    core::Provenance provenance;
};

enum class QAFormat { mcq, open, tf };
enum class Split { text, visual };

std::string_view to_string(QAFormat f);
std::optional<QAFormat> parse_qa_format(std::string_view s);
std::string_view to_string(Split s);

struct QAItem {
    std::string id;
    QAFormat format = QAFormat::open;
    std::string question;
    std::string answer;  // tf: "true" | "false"
    std::vector<std::string> options;  // mcq only
    std::vector<std::string> evidence;  // fact ids (text) or chart ids (visual)
    Split split = Split::text;
    std::string category;  // visual: anomaly | forecasting | imputation | reasoning
    std::optional<double> gold_value;
    std::optional<double> tolerance;
    bool review_flag = false;  // set by human reviewers; never by the pipeline
    nlohmann::json extra = nlohmann::json::object();

    nlohmann::json to_json() const;
    static QAItem from_json(const nlohmann::json& j);
};

nlohmann::json to_json(const core::Provenance& p);
core::Provenance provenance_from_json(const nlohmann::json& j);

}  // namespace climagent::textforge
