#pragma once

#include <optional>
#include <string>
#include <vector>

#include "climagent/core/time.hpp"
#include "climagent/llm/backend.hpp"
#include "climagent/textforge/types.hpp"
#include "climagent/tools/providers.hpp"

namespace climagent::textforge {

struct RetrievalOptions {
    std::size_t max_rounds = 3;
    std::size_t results_per_round = 5;
    /// Minimum fraction of the keyword's content words found in a result's
    /// title + snippet.
    double relevance_threshold = 0.5;
    /// Host suffixes treated as authoritative; empty accepts any host.
    std::vector<std::string> domain_allowlist;
    core::Instant retrieved_at{};
};

struct RetrievedDocument {
    std::string url;
    std::string raw;
    std::string kind;  // html | pdf_text
    core::Provenance provenance;
};

/// Host part of an http(s) URL, lowercased.
std::string url_host(std::string_view url);
bool host_allowed(std::string_view url, const std::vector<std::string>& allowlist);
/// Lowercased alphanumeric words minus stopwords.
std::vector<std::string> content_words(std::string_view text);
double relevance_score(const Keyword& keyword, const tools::SearchResult& result);

/// Search, score, fetch accepted results; when nothing is accepted the
/// "refine" channel proposes the next query (turn = round index). Every
/// document's provenance trace lists the queries issued so far. Throws
/// NoRelevantResults after max_rounds.
std::vector<RetrievedDocument> retrieve_documents(const Keyword& keyword, const tools::SearchProvider& search,
                                                  const tools::PageFetcher& fetcher, llm::Backend* refiner,
                                                  const RetrievalOptions& options = {});

struct FactOptions {
    std::size_t max_words = 60;
};

struct FactInduction {
    std::vector<AtomicFact> facts;
    std::size_t dropped = 0;
    std::vector<std::string> drop_reasons;
};

/// Structural screen for one statement; `why` receives the rejection reason.
bool acceptable_fact(std::string_view statement, const FactOptions& options = {}, std::string* why = nullptr);

/// One "facts" request for the chunk. The reply is a JSON array of strings
/// or of {statement, chunk_ref}; facts naming another chunk are rejected.
FactInduction induce_facts(const Chunk& chunk, llm::Backend& backend, const FactOptions& options = {});

}  // namespace climagent::textforge
