#include "climagent/textforge/pipeline.hpp"

#include <fstream>
#include <set>

#include "climagent/core/error.hpp"

namespace climagent::textforge {

using nlohmann::json;

json to_json(const Chunk& c) {
    return {{"id", c.id},           {"doc_id", c.doc_id}, {"start", c.start}, {"length", c.tokens.size()},
            {"section_path", c.section_path}, {"text", c.text()}};
}

json to_json(const AtomicFact& f) {
    return {{"id", f.id}, {"statement", f.statement}, {"chunk_ref", f.chunk_ref}};
}

json to_json(const Document& d) {
    return {{"id", d.id}, {"provenance", to_json(d.provenance)}, {"text", d.clean_text}};
}

TextDataset run_text_pipeline(const TextPipelineConfig& config, const tools::SearchProvider& search,
                              const tools::PageFetcher& fetcher, llm::Backend& backend, KeywordIndex& index,
                              const Embedder& embedder) {
    TextDataset ds;
    auto& n = ds.counters;
    for (const char* k : {"keywords_proposed", "keywords_kept", "keywords_rejected", "retrieval_misses",
                          "documents", "documents_unparsed", "chunks", "facts", "facts_dropped", "items",
                          "items_dropped"})
        n[k] = 0;

    auto expansion = expand_keywords(config.seeds, config.places, backend, index, embedder);
    n["keywords_proposed"] = expansion.proposed;
    n["keywords_kept"] = expansion.kept.size();
    n["keywords_rejected"] = expansion.rejected;
    ds.keywords = expansion.kept;

    std::set<std::string> urls;
    for (const auto& kw : ds.keywords) {
        std::vector<RetrievedDocument> found;
        try {
            found = retrieve_documents(kw, search, fetcher, &backend, config.retrieval);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::NoRelevantResults) throw;
            ++n["retrieval_misses"];
            ds.drop_reasons.push_back(std::string("retrieval: ") + e.what());
            continue;
        }
        for (auto& r : found) {
            if (!urls.insert(r.url).second) continue;
            ParsedDocument parsed;
            try {
                parsed = parse_document(r.raw, r.kind, r.url);
            } catch (const Error& e) {
                ++n["documents_unparsed"];
                ds.drop_reasons.push_back(r.url + ": " + e.what());
                continue;
            }
            Document d;
            d.id = "doc-" + std::to_string(ds.documents.size() + 1);
            d.clean_text = std::move(parsed.clean_text);
            d.provenance = r.provenance;
            if (parsed.metadata.title) d.provenance.title = parsed.metadata.title;
            if (parsed.metadata.organization) d.provenance.organization = parsed.metadata.organization;
            if (parsed.metadata.date) d.provenance.published = parsed.metadata.date;
            d.provenance.validate();
            ds.documents.push_back(std::move(d));
        }
    }
    n["documents"] = ds.documents.size();

    for (const auto& d : ds.documents)
        for (auto& c : chunk_document(d, config.chunking)) ds.chunks.push_back(std::move(c));
    n["chunks"] = ds.chunks.size();

    for (const auto& c : ds.chunks) {
        auto fi = induce_facts(c, backend, config.facts);
        n["facts_dropped"] += fi.dropped;
        for (auto& r : fi.drop_reasons) ds.drop_reasons.push_back(std::move(r));
        for (auto& f : fi.facts) ds.facts.push_back(std::move(f));
    }
    n["facts"] = ds.facts.size();

    if (!ds.facts.empty())
        for (auto format : config.formats) {
            auto qs = synthesize_qa(ds.facts, format, backend, config.qa);
            n["items_dropped"] += qs.dropped;
            for (auto& r : qs.drop_reasons) ds.drop_reasons.push_back(std::move(r));
            for (auto& it : qs.items) ds.items.push_back(std::move(it));
        }
    n["items"] = ds.items.size();
    return ds;
}

std::vector<std::string> validate_evidence_chain(const TextDataset& ds) {
    std::vector<std::string> problems;
    std::map<std::string, const AtomicFact*> facts;
    std::map<std::string, const Chunk*> chunks;
    std::map<std::string, const Document*> docs;
    for (const auto& f : ds.facts) facts[f.id] = &f;
    for (const auto& c : ds.chunks) chunks[c.id] = &c;
    for (const auto& d : ds.documents) docs[d.id] = &d;
    for (const auto& item : ds.items) {
        if (item.evidence.empty()) problems.push_back(item.id + ": no evidence");
        for (const auto& ref : item.evidence) {
            auto f = facts.find(ref);
            if (f == facts.end()) {
                problems.push_back(item.id + ": unknown fact " + ref);
                continue;
            }
            auto c = chunks.find(f->second->chunk_ref);
            if (c == chunks.end()) {
                problems.push_back(ref + ": unknown chunk " + f->second->chunk_ref);
                continue;
            }
            auto d = docs.find(c->second->doc_id);
            if (d == docs.end()) {
                problems.push_back(c->first + ": unknown document " + c->second->doc_id);
                continue;
            }
            const auto& p = d->second->provenance;
            if (!p.url && !p.title) problems.push_back(d->first + ": provenance has neither url nor title");
        }
    }
    return problems;
}

namespace {

void write_lines(const std::filesystem::path& path, const std::vector<json>& rows) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::SinkFailure, "cannot write " + path.string());
    for (const auto& r : rows) out << r.dump() << '\n';
    if (!out) throw Error(ErrorCode::SinkFailure, "write failed for " + path.string());
}

}  // namespace

void write_text_dataset(const TextDataset& ds, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::SinkFailure, "cannot create " + dir.string());

    std::map<std::string, const AtomicFact*> facts;
    std::map<std::string, const Chunk*> chunks;
    std::map<std::string, const Document*> docs;
    for (const auto& f : ds.facts) facts[f.id] = &f;
    for (const auto& c : ds.chunks) chunks[c.id] = &c;
    for (const auto& d : ds.documents) docs[d.id] = &d;

    std::vector<json> rows;
    for (const auto& item : ds.items) {
        auto j = item.to_json();
        json chain = json::array();
        for (const auto& ref : item.evidence) {
            json link{{"fact", ref}};
            if (auto f = facts.find(ref); f != facts.end()) {
                link["chunk"] = f->second->chunk_ref;
                if (auto c = chunks.find(f->second->chunk_ref); c != chunks.end()) {
                    link["document"] = c->second->doc_id;
                    if (auto d = docs.find(c->second->doc_id); d != docs.end())
                        link["provenance"] = to_json(d->second->provenance);
                }
            }
            chain.push_back(link);
        }
        j["evidence_chain"] = chain;
        rows.push_back(std::move(j));
    }
    write_lines(dir / "items.jsonl", rows);

    rows.clear();
    for (const auto& f : ds.facts) rows.push_back(to_json(f));
    write_lines(dir / "facts.jsonl", rows);
    rows.clear();
    for (const auto& c : ds.chunks) rows.push_back(to_json(c));
    write_lines(dir / "chunks.jsonl", rows);
    rows.clear();
    for (const auto& d : ds.documents) rows.push_back(to_json(d));
    write_lines(dir / "documents.jsonl", rows);

    json counters = json::object();
    for (const auto& [k, v] : ds.counters) counters[k] = v;
    json summary{{"counters", counters}, {"drop_reasons", ds.drop_reasons}};
    write_lines(dir / "counters.json", {summary});
}

}  // namespace climagent::textforge
