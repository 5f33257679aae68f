#include "climagent/textforge/retrieval.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include <nlohmann/json.hpp>

#include "climagent/core/error.hpp"

namespace climagent::textforge {

using nlohmann::json;

namespace {

const std::set<std::string>& stopwords() {
    static const std::set<std::string> s{
        "a",    "an",   "and",  "are",  "as",   "at",   "be",   "by",   "for",  "from", "has",  "have", "in",
        "is",   "it",   "its",  "of",   "on",   "or",   "that", "the",  "this", "to",   "was",  "were", "will",
        "with", "what", "when", "where", "which", "who", "how", "than", "then", "there", "their", "these",
        "those", "been", "but", "not", "no",   "can",  "into", "about", "over", "also", "more", "most", "such"};
    return s;
}

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r\n\"'`");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n\"'`");
    return std::string(s.substr(b, e - b + 1));
}

}  // namespace

std::string url_host(std::string_view url) {
    auto p = url.find("://");
    auto rest = p == std::string_view::npos ? url : url.substr(p + 3);
    auto end = rest.find_first_of("/?#:");
    std::string host(rest.substr(0, end));
    for (auto& c : host) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return host;
}

bool host_allowed(std::string_view url, const std::vector<std::string>& allowlist) {
    if (allowlist.empty()) return true;
    auto host = url_host(url);
    return std::any_of(allowlist.begin(), allowlist.end(), [&](const std::string& suffix) {
        if (host == suffix) return true;
        return host.size() > suffix.size() && host.compare(host.size() - suffix.size(), suffix.size(), suffix) == 0 &&
               host[host.size() - suffix.size() - 1] == '.';
    });
}

std::vector<std::string> content_words(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    auto push = [&] {
        if (!cur.empty() && !stopwords().count(cur)) out.push_back(cur);
        cur.clear();
    };
    for (char ch : text) {
        auto c = static_cast<unsigned char>(ch);
        if (std::isalnum(c) || c >= 0x80) cur.push_back(static_cast<char>(std::tolower(c)));
        else push();
    }
    push();
    return out;
}

double relevance_score(const Keyword& keyword, const tools::SearchResult& result) {
    auto want = content_words(keyword.text);
    std::set<std::string> unique(want.begin(), want.end());
    if (unique.empty()) return 0.0;
    auto have_list = content_words(result.title + " " + result.snippet);
    std::set<std::string> have(have_list.begin(), have_list.end());
    std::size_t hit = 0;
    for (const auto& w : unique) hit += have.count(w);
    return static_cast<double>(hit) / static_cast<double>(unique.size());
}

std::vector<RetrievedDocument> retrieve_documents(const Keyword& keyword, const tools::SearchProvider& search,
                                                  const tools::PageFetcher& fetcher, llm::Backend* refiner,
                                                  const RetrievalOptions& options) {
    if (options.max_rounds < 1) throw Error(ErrorCode::InvalidArgument, "max_rounds must be at least 1");
    std::vector<std::string> trace;
    std::string query = keyword.text;
    std::set<std::string> seen_urls;
    for (std::size_t round = 0; round < options.max_rounds; ++round) {
        trace.push_back(query);
        auto results = search.search(query, options.results_per_round);
        std::vector<RetrievedDocument> docs;
        std::vector<std::string> off_domain;
        for (const auto& r : results) {
            if (r.url.empty() || !seen_urls.insert(r.url).second) continue;
            if (!host_allowed(r.url, options.domain_allowlist) || relevance_score(keyword, r) < options.relevance_threshold) {
                off_domain.push_back(r.title);
                continue;
            }
            tools::FetchedPage page;
            try {
                page = fetcher.fetch(r.url);
            } catch (const Error&) {
                off_domain.push_back(r.title + " (unreachable)");
                continue;
            }
            RetrievedDocument d;
            d.url = r.url;
            d.raw = std::move(page.body);
            d.kind = page.kind;
            d.provenance.url = r.url;
            if (!r.title.empty()) d.provenance.title = r.title;
            d.provenance.query = keyword.text;
            d.provenance.retrieved_at = options.retrieved_at;
            d.provenance.trace = trace;
            docs.push_back(std::move(d));
        }
        if (!docs.empty()) return docs;
        if (!refiner || round + 1 == options.max_rounds) break;

        std::string rejected;
        for (const auto& t : off_domain) rejected += "- " + t + "\n";
        llm::ChatRequest req;
        req.channel = "refine";
        req.turn = static_cast<int>(round);
        req.messages = {{"system", "The search results were off-domain or not authoritative. Propose one refined "
                                   "search query. Reply with the query only."},
                        {"user", keyword.text},
                        {"user", "Previous query: " + query + "\nRejected results:\n" + rejected}};
        auto reply = refiner->complete(req);
        auto j = json::parse(reply, nullptr, false);
        std::string next;
        if (!j.is_discarded() && j.is_object() && j.contains("query") && j["query"].is_string())
            next = trim(j["query"].get<std::string>());
        else
            next = trim(reply.substr(0, reply.find('\n')));
        if (next.empty()) break;
        query = next;
    }
    throw Error(ErrorCode::NoRelevantResults,
                "no relevant results for '" + keyword.text + "' after " + std::to_string(trace.size()) + " round(s)");
}

bool acceptable_fact(std::string_view statement, const FactOptions& options, std::string* why) {
    auto fail = [&](const char* reason) {
        if (why) *why = reason;
        return false;
    };
    auto s = trim(statement);
    if (s.empty()) return fail("empty statement");
    std::size_t words = 0;
    {
        bool in = false;
        for (char c : s) {
            bool ws = std::isspace(static_cast<unsigned char>(c));
            if (!ws && !in) ++words;
            in = !ws;
        }
    }
    if (words > options.max_words) return fail("statement too long");
    if (content_words(s).empty()) return fail("no content words");
    bool has_alpha = std::any_of(s.begin(), s.end(), [](char c) { return std::isalpha(static_cast<unsigned char>(c)); });
    if (!has_alpha) return fail("no content words");
    // More than one sentence: terminal punctuation followed by a capitalized word.
    for (std::size_t k = 0; k + 2 < s.size(); ++k) {
        if ((s[k] == '.' || s[k] == '!' || s[k] == '?') && s[k + 1] == ' ' &&
            std::isupper(static_cast<unsigned char>(s[k + 2]))) {
            // Abbreviations such as "St. " or initials are short tokens before the dot.
            auto b = s.rfind(' ', k);
            auto token = s.substr(b == std::string::npos ? 0 : b + 1, k - (b == std::string::npos ? 0 : b + 1));
            if (token.size() > 3) return fail("multiple sentences");
        }
    }
    if (s.find(';') != std::string::npos) return fail("clauses joined by semicolon");
    auto lower = s;
    for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    for (const char* joint : {", and ", ", but ", ", while ", " whereas ", ", however", " as well as "})
        if (lower.find(joint) != std::string::npos) return fail("compound claim");
    return true;
}

FactInduction induce_facts(const Chunk& chunk, llm::Backend& backend, const FactOptions& options) {
    if (chunk.tokens.empty()) throw Error(ErrorCode::InvalidArgument, "empty chunk");
    FactInduction out;
    llm::ChatRequest req;
    req.channel = "facts";
    std::string header;
    for (const auto& s : chunk.section_path) header += (header.empty() ? "" : " > ") + s;
    req.messages = {{"system", "Extract atomic, verifiable factual statements from the passage, one claim per "
                               "statement. Reply with a JSON array of strings."},
                    {"user", "Chunk " + chunk.id + (header.empty() ? "" : " [" + header + "]") + ":\n" + chunk.text()}};
    auto reply = backend.complete(req);
    auto lb = reply.find('['), rb = reply.rfind(']');
    json arr;
    if (lb != std::string::npos && rb != std::string::npos && rb > lb) arr = json::parse(reply.substr(lb, rb - lb + 1), nullptr, false);
    if (arr.is_discarded() || !arr.is_array()) {
        if (reply.find_first_not_of(" \t\r\n") != std::string::npos) {
            ++out.dropped;
            out.drop_reasons.push_back(chunk.id + ": unparseable fact list");
        }
        return out;
    }
    std::size_t k = 0;
    for (const auto& e : arr) {
        std::string statement, ref = chunk.id;
        if (e.is_string()) {
            statement = e.get<std::string>();
        } else if (e.is_object() && e.contains("statement") && e["statement"].is_string()) {
            statement = e["statement"].get<std::string>();
            if (e.contains("chunk_ref")) ref = e["chunk_ref"].is_string() ? e["chunk_ref"].get<std::string>() : "";
        } else {
            ++out.dropped;
            out.drop_reasons.push_back(chunk.id + ": malformed fact entry");
            continue;
        }
        std::string why;
        if (ref != chunk.id) {
            ++out.dropped;
            out.drop_reasons.push_back(chunk.id + ": unresolvable chunk_ref '" + ref + "'");
            continue;
        }
        if (!acceptable_fact(statement, options, &why)) {
            ++out.dropped;
            out.drop_reasons.push_back(chunk.id + ": " + why);
            continue;
        }
        AtomicFact f;
        f.id = chunk.id + "/f" + std::to_string(k++);
        f.statement = trim(statement);
        f.chunk_ref = chunk.id;
        f.provenance = chunk.provenance;
        out.facts.push_back(std::move(f));
    }
    return out;
}

}  // namespace climagent::textforge
