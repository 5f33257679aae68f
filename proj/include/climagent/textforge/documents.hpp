#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "climagent/textforge/types.hpp"

namespace climagent::textforge {

struct DocumentMetadata {
    std::optional<std::string> title;
    std::optional<std::string> organization;
    std::optional<std::string> date;  // YYYY-MM-DD
    std::optional<std::string> url;
};

struct ParsedDocument {
    /// Paragraphs separated by blank lines; section headers are kept as
    /// lines starting with one '#' per heading level.
    std::string clean_text;
    DocumentMetadata metadata;
};

/// kind: html | pdf_text. Throws UnsupportedFormat or EmptyAfterCleaning.
/// `url` fills metadata.url when the document does not name its own.
ParsedDocument parse_document(std::string_view raw, std::string_view kind, std::string_view url = {});

/// Whitespace word tokens of clean text. Header marker tokens ("##") are
/// dropped but header words kept; `breaks` holds the token index where each
/// paragraph or section begins, and `sections[i]` the header path in force
/// at token i.
struct TokenizedText {
    std::vector<std::string> tokens;
    std::set<std::size_t> breaks;
    std::vector<std::vector<std::string>> sections;
};
TokenizedText tokenize(std::string_view clean_text);

struct ChunkOptions {
    std::size_t window = 512;
    std::size_t stride = 384;
    bool align = false;
    std::size_t snap = 48;
};

struct ChunkSpan {
    std::size_t start = 0;
    std::size_t length = 0;
    friend bool operator==(const ChunkSpan&, const ChunkSpan&) = default;
};

/// Window starts advance by the stride until a window reaches the last
/// token; the final window may be short. With alignment, each start snaps
/// back to the nearest break within `snap` tokens that still moves forward.
std::vector<ChunkSpan> chunk_spans(std::size_t token_count, const ChunkOptions& options = {},
                                   const std::set<std::size_t>& breaks = {});

/// Chunks with ids "<doc>#<m>" carrying the document's provenance.
std::vector<Chunk> chunk_document(const Document& doc, const ChunkOptions& options = {});

}  // namespace climagent::textforge
