#pragma once

#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "climagent/llm/backend.hpp"
#include "climagent/textforge/types.hpp"

namespace climagent::textforge {

class Embedder {
public:
    virtual ~Embedder() = default;
    virtual std::size_t dimension() const = 0;
    /// Unit-length vector; throws InvalidArgument when the text has no tokens.
    virtual std::vector<double> embed(std::string_view text) const = 0;
};

/// Signed feature hashing of lowercased word tokens (order and case
/// insensitive), L2-normalized. Deterministic and offline.
class HashingEmbedder final : public Embedder {
public:
    explicit HashingEmbedder(std::size_t dimension = 256);
    std::size_t dimension() const override { return dim_; }
    std::vector<double> embed(std::string_view text) const override;

private:
    std::size_t dim_;
};

/// Throws DimensionMismatch on differing sizes and InvalidArgument on a zero vector.
double cosine(std::span<const double> a, std::span<const double> b);

struct FilterVerdict {
    bool kept = false;
    std::optional<double> max_sim;  // empty when the index was empty
};

/// Accepted keywords; no stored pair reaches cosine >= tau. Mutations are
/// serialized, so one index can be shared between workers.
class KeywordIndex {
public:
    explicit KeywordIndex(std::size_t dimension, double tau = 0.85);
    KeywordIndex(const KeywordIndex&) = delete;
    KeywordIndex& operator=(const KeywordIndex&) = delete;

    std::size_t dimension() const noexcept { return dim_; }
    double tau() const noexcept { return tau_; }

    /// Check and insert in one step.
    FilterVerdict filter(const Keyword& candidate);
    /// Max cosine against the stored set without inserting.
    std::optional<double> max_similarity(std::span<const double> embedding) const;

    std::vector<Keyword> entries() const;
    std::size_t size() const;

    /// "keyword-index/1"
    nlohmann::json to_json() const;
    static std::unique_ptr<KeywordIndex> from_json(const nlohmann::json& j);
    void save(const std::filesystem::path& path) const;
    static std::unique_ptr<KeywordIndex> load(const std::filesystem::path& path);

private:
    std::optional<double> max_similarity_locked(std::span<const double> embedding) const;

    std::size_t dim_;
    double tau_;
    mutable std::mutex mu_;
    std::vector<Keyword> entries_;
};

FilterVerdict filter_keyword(const Keyword& candidate, KeywordIndex& index);

struct PlaceConstraint {
    std::optional<std::string> country;
    std::optional<std::string> city;
};

struct KeywordExpansion {
    std::vector<Keyword> kept;
    std::size_t proposed = 0;
    std::size_t rejected = 0;
};

/// One "keywords" request per constraint (turn = constraint position); the
/// reply is a JSON array of strings, or one candidate per line.
KeywordExpansion expand_keywords(std::span<const std::string> seeds, std::span<const PlaceConstraint> constraints,
                                 llm::Backend& backend, KeywordIndex& index, const Embedder& embedder);

/// Candidate strings from a generator reply.
std::vector<std::string> parse_candidate_list(std::string_view reply);

}  // namespace climagent::textforge
