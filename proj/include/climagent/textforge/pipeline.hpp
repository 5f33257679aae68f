#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "climagent/llm/backend.hpp"
#include "climagent/textforge/documents.hpp"
#include "climagent/textforge/keywords.hpp"
#include "climagent/textforge/qa.hpp"
#include "climagent/textforge/retrieval.hpp"
#include "climagent/tools/providers.hpp"

namespace climagent::textforge {

struct TextPipelineConfig {
    std::vector<std::string> seeds;
    std::vector<PlaceConstraint> places;
    std::vector<QAFormat> formats{QAFormat::mcq, QAFormat::open, QAFormat::tf};
    RetrievalOptions retrieval;
    ChunkOptions chunking;
    FactOptions facts;
    QAOptions qa;
};

struct TextDataset {
    std::vector<Keyword> keywords;
    std::vector<Document> documents;
    std::vector<Chunk> chunks;
    std::vector<AtomicFact> facts;
    std::vector<QAItem> items;
    /// proposed/kept/rejected keywords, retrieval misses, parse failures,
    /// dropped facts and dropped items.
    std::map<std::string, std::size_t> counters;
    std::vector<std::string> drop_reasons;
};

/// Keywords -> retrieval -> parsing -> chunking -> facts -> QA. Documents are
/// numbered "doc-<n>" in first-retrieval order; a URL reached twice is kept once.
TextDataset run_text_pipeline(const TextPipelineConfig& config, const tools::SearchProvider& search,
                              const tools::PageFetcher& fetcher, llm::Backend& backend, KeywordIndex& index,
                              const Embedder& embedder);

/// Every item's evidence resolves item -> fact -> chunk -> document ->
/// provenance with url or title. Returns the problems found.
std::vector<std::string> validate_evidence_chain(const TextDataset& dataset);

/// items.jsonl (each item with its provenance chain), facts.jsonl,
/// chunks.jsonl, documents.jsonl and counters.json. Throws SinkFailure.
void write_text_dataset(const TextDataset& dataset, const std::filesystem::path& dir);

nlohmann::json to_json(const Chunk& c);
nlohmann::json to_json(const AtomicFact& f);
nlohmann::json to_json(const Document& d);

}  // namespace climagent::textforge
