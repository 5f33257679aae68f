#include "climagent/textforge/keywords.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "climagent/core/error.hpp"

namespace climagent::textforge {

using nlohmann::json;

namespace {

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::vector<std::string> word_tokens(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : text) {
        auto c = static_cast<unsigned char>(ch);
        if (std::isalnum(c) || c >= 0x80) {
            cur.push_back(static_cast<char>(std::tolower(c)));
        } else if (!cur.empty()) {
            out.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

}  // namespace

HashingEmbedder::HashingEmbedder(std::size_t dimension) : dim_(dimension) {
    if (dim_ == 0) throw Error(ErrorCode::InvalidArgument, "embedding dimension must be positive");
}

std::vector<double> HashingEmbedder::embed(std::string_view text) const {
    auto tokens = word_tokens(text);
    if (tokens.empty()) throw Error(ErrorCode::InvalidArgument, "cannot embed text without tokens");
    std::vector<double> v(dim_, 0.0);
    for (const auto& t : tokens) {
        auto h = fnv1a(t);
        v[h % dim_] += (h >> 63) ? -1.0 : 1.0;
    }
    double norm = 0;
    for (double x : v) norm += x * x;
    if (norm == 0) {
        // Every token cancelled out; fall back to an unsigned count.
        for (const auto& t : tokens) v[fnv1a(t) % dim_] += 1.0;
        for (double x : v) norm += x * x;
    }
    norm = std::sqrt(norm);
    for (double& x : v) x /= norm;
    return v;
}

double cosine(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw Error(ErrorCode::DimensionMismatch,
                    "embedding dimension " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
    double dot = 0, na = 0, nb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0 || nb == 0) throw Error(ErrorCode::InvalidArgument, "zero embedding");
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

KeywordIndex::KeywordIndex(std::size_t dimension, double tau) : dim_(dimension), tau_(tau) {
    if (dim_ == 0) throw Error(ErrorCode::InvalidArgument, "index dimension must be positive");
    if (!(tau > 0.0 && tau <= 1.0)) throw Error(ErrorCode::InvalidArgument, "tau must be in (0, 1]");
}

std::optional<double> KeywordIndex::max_similarity_locked(std::span<const double> e) const {
    if (e.size() != dim_)
        throw Error(ErrorCode::DimensionMismatch,
                    "candidate dimension " + std::to_string(e.size()) + ", index " + std::to_string(dim_));
    std::optional<double> best;
    for (const auto& k : entries_) {
        double s = cosine(e, k.embedding);
        if (!best || s > *best) best = s;
    }
    return best;
}

std::optional<double> KeywordIndex::max_similarity(std::span<const double> embedding) const {
    std::lock_guard lock(mu_);
    return max_similarity_locked(embedding);
}

FilterVerdict KeywordIndex::filter(const Keyword& candidate) {
    std::lock_guard lock(mu_);
    FilterVerdict v;
    v.max_sim = max_similarity_locked(candidate.embedding);
    if (!v.max_sim) {
        // Validates the zero-vector case for the first entry too.
        cosine(candidate.embedding, candidate.embedding);
    }
    v.kept = !v.max_sim || *v.max_sim < tau_;
    if (v.kept) entries_.push_back(candidate);
    return v;
}

std::vector<Keyword> KeywordIndex::entries() const {
    std::lock_guard lock(mu_);
    return entries_;
}

std::size_t KeywordIndex::size() const {
    std::lock_guard lock(mu_);
    return entries_.size();
}

json KeywordIndex::to_json() const {
    std::lock_guard lock(mu_);
    json arr = json::array();
    for (const auto& k : entries_) {
        json e{{"text", k.text}, {"embedding", k.embedding}};
        if (k.country) e["country"] = *k.country;
        if (k.city) e["city"] = *k.city;
        arr.push_back(e);
    }
    return {{"format", "keyword-index/1"}, {"dimension", dim_}, {"tau", tau_}, {"keywords", arr}};
}

std::unique_ptr<KeywordIndex> KeywordIndex::from_json(const json& j) {
    if (!j.is_object() || j.value("format", "") != "keyword-index/1")
        throw Error(ErrorCode::ParseError, "not a keyword-index/1 document");
    try {
        auto idx = std::make_unique<KeywordIndex>(j.at("dimension").get<std::size_t>(), j.at("tau").get<double>());
        for (const auto& e : j.at("keywords")) {
            Keyword k;
            k.text = e.at("text").get<std::string>();
            k.embedding = e.at("embedding").get<std::vector<double>>();
            if (e.contains("country")) k.country = e["country"].get<std::string>();
            if (e.contains("city")) k.city = e["city"].get<std::string>();
            // Stored entries were accepted under the same tau; re-inserting
            // them verbatim keeps the invariant checkable on load.
            if (!idx->filter(k).kept)
                throw Error(ErrorCode::ParseError, "stored keyword '" + k.text + "' violates the index threshold");
        }
        return idx;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("keyword index: ") + e.what());
    }
}

void KeywordIndex::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::SinkFailure, "cannot write " + path.string());
    out << to_json().dump(1) << '\n';
    if (!out) throw Error(ErrorCode::SinkFailure, "write failed for " + path.string());
}

std::unique_ptr<KeywordIndex> KeywordIndex::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::ConfigError, "cannot read " + path.string());
    auto j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw Error(ErrorCode::ParseError, path.string() + " is not JSON");
    return from_json(j);
}

FilterVerdict filter_keyword(const Keyword& candidate, KeywordIndex& index) { return index.filter(candidate); }

std::vector<std::string> parse_candidate_list(std::string_view reply) {
    std::vector<std::string> out;
    auto lb = reply.find('['), rb = reply.rfind(']');
    if (lb != std::string_view::npos && rb != std::string_view::npos && rb > lb) {
        auto j = json::parse(reply.substr(lb, rb - lb + 1), nullptr, false);
        if (!j.is_discarded() && j.is_array()) {
            for (const auto& e : j) {
                if (e.is_string()) out.push_back(trim(e.get<std::string>()));
                else if (e.is_object() && e.contains("keyword") && e["keyword"].is_string())
                    out.push_back(trim(e["keyword"].get<std::string>()));
            }
            std::erase_if(out, [](const std::string& s) { return s.empty(); });
            return out;
        }
    }
    std::istringstream in{std::string(reply)};
    std::string line;
    while (std::getline(in, line)) {
        auto t = trim(line);
        // Strip list bullets and numbering.
        std::size_t k = 0;
        while (k < t.size() && (t[k] == '-' || t[k] == '*' || t[k] == ' ' || std::isdigit(static_cast<unsigned char>(t[k])) ||
                                ((t[k] == '.' || t[k] == ')') && k > 0)))
            ++k;
        t = trim(t.substr(k));
        if (!t.empty()) out.push_back(t);
    }
    return out;
}

KeywordExpansion expand_keywords(std::span<const std::string> seeds, std::span<const PlaceConstraint> constraints,
                                 llm::Backend& backend, KeywordIndex& index, const Embedder& embedder) {
    if (seeds.empty()) throw Error(ErrorCode::InvalidArgument, "no seed topics");
    if (embedder.dimension() != index.dimension())
        throw Error(ErrorCode::DimensionMismatch, "embedder and index dimensions differ");
    std::vector<PlaceConstraint> places(constraints.begin(), constraints.end());
    if (places.empty()) places.emplace_back();

    std::string seed_text;
    for (const auto& s : seeds) seed_text += "- " + s + "\n";

    KeywordExpansion out;
    for (std::size_t c = 0; c < places.size(); ++c) {
        const auto& place = places[c];
        llm::ChatRequest req;
        req.channel = "keywords";
        req.turn = static_cast<int>(c);
        req.messages = {
            {"system",
             "Propose web search keywords and query templates about climate and environment topics for the given "
             "place. Reply with a JSON array of strings."},
            {"user", "Topics:\n" + seed_text + "Country: " + place.country.value_or("any") +
                         "\nCity: " + place.city.value_or("any")},
        };
        auto reply = backend.complete(req);
        for (auto& text : parse_candidate_list(reply)) {
            ++out.proposed;
            Keyword k;
            try {
                k.embedding = embedder.embed(text);
            } catch (const Error&) {
                ++out.rejected;
                continue;
            }
            k.text = std::move(text);
            k.country = place.country;
            k.city = place.city;
            if (index.filter(k).kept) out.kept.push_back(std::move(k));
            else ++out.rejected;
        }
    }
    return out;
}

}  // namespace climagent::textforge
