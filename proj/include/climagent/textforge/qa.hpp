#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "climagent/llm/backend.hpp"
#include "climagent/textforge/types.hpp"

namespace climagent::textforge {

struct QAOptions {
    std::size_t open_answer_word_budget = 40;
    std::size_t min_mcq_options = 3;
};

/// Structural rules shared by text and visual items: non-empty question and
/// evidence; MCQ with >= 3 distinct options and the answer among them; TF
/// answers "true"/"false"; open answers within the word budget.
bool validate_qa_item(const QAItem& item, const QAOptions& options, std::string* why = nullptr);

/// Items as emitted by a generator backend: a JSON object or array of
/// objects with question/answer/options. Unparseable text yields nothing.
std::vector<QAItem> parse_generated_items(std::string_view text, QAFormat format);

struct QASynthesis {
    std::vector<QAItem> items;
    std::size_t dropped = 0;
    std::vector<std::string> drop_reasons;
};

/// One generation request per fact. TF requests must yield an entailed
/// (true) and a contradicted (false) variant; a batch missing either side is
/// dropped whole.
QASynthesis synthesize_qa(std::span<const AtomicFact> facts, QAFormat format, llm::Backend& backend,
                          const QAOptions& options = {});

}  // namespace climagent::textforge
