#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <random>
#include <thread>

#include "climagent/core/error.hpp"
#include "climagent/core/time.hpp"
#include "climagent/llm/backend.hpp"
#include "climagent/textforge/documents.hpp"
#include "climagent/textforge/keywords.hpp"
#include "climagent/textforge/pipeline.hpp"
#include "climagent/textforge/qa.hpp"
#include "climagent/textforge/retrieval.hpp"
#include "climagent/tools/providers.hpp"
#include "support.hpp"

using namespace climagent;
using namespace climagent::textforge;

namespace {

std::vector<double> unit_vector(std::mt19937_64& rng, std::size_t dim) {
    std::normal_distribution<double> n(0.0, 1.0);
    std::vector<double> v(dim);
    double norm = 0;
    for (auto& x : v) {
        x = n(rng);
        norm += x * x;
    }
    for (auto& x : v) x /= std::sqrt(norm);
    return v;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

Keyword kw(std::string text, std::vector<double> e) {
    Keyword k;
    k.text = std::move(text);
    k.embedding = std::move(e);
    return k;
}

struct StaticSearch : tools::SearchProvider {
    std::map<std::string, std::vector<tools::SearchResult>> by_query;
    std::vector<tools::SearchResult> search(std::string_view q, std::size_t k) const override {
        auto it = by_query.find(std::string(q));
        if (it == by_query.end()) return {};
        auto out = it->second;
        if (out.size() > k) out.resize(k);
        return out;
    }
};

struct StaticFetcher : tools::PageFetcher {
    tools::FetchedPage fetch(std::string_view url) const override {
        return {std::string(url), "<html><head><title>Heat</title></head><body><p>Doha heat rose.</p></body></html>",
                "html"};
    }
};

}  // namespace

// keyword filter
TEST(Keywords, FilterMatchesPairwiseScan) {
    std::mt19937_64 rng(2);
    const std::size_t dim = 6;  // low dimension so rejections happen often
    KeywordIndex index(dim, 0.85);
    std::vector<std::vector<double>> stored;
    int rejected = 0;
    for (int k = 0; k < 120; ++k) {
        auto v = unit_vector(rng, dim);
        double best = -2;
        for (const auto& s : stored) best = std::max(best, dot(v, s));
        bool expect = stored.empty() || best < 0.85;
        auto verdict = index.filter(kw("k" + std::to_string(k), v));
        EXPECT_EQ(verdict.kept, expect);
        if (!stored.empty()) EXPECT_NEAR(*verdict.max_sim, best, 1e-12);
        if (expect)
            stored.push_back(v);
        else
            ++rejected;
    }
    EXPECT_GT(rejected, 0);
    EXPECT_EQ(index.size(), stored.size());
}

TEST(Keywords, ConcurrentInsertsKeepInvariant) {
    const std::size_t dim = 5;
    KeywordIndex index(dim, 0.85);
    std::vector<std::thread> threads;
    for (int t = 0; t < 4; ++t)
        threads.emplace_back([&, t] {
            std::mt19937_64 rng(100 + t);
            for (int k = 0; k < 50; ++k) index.filter(kw("t", unit_vector(rng, dim)));
        });
    for (auto& th : threads) th.join();
    auto entries = index.entries();
    for (std::size_t a = 0; a < entries.size(); ++a)
        for (std::size_t b = a + 1; b < entries.size(); ++b)
            EXPECT_LT(cosine(entries[a].embedding, entries[b].embedding), 0.85);
}

TEST(Keywords, DimensionAndPersistence) {
    EXPECT_THROW(cosine(std::vector<double>{1, 0}, std::vector<double>{1, 0, 0}), Error);
    KeywordIndex index(3, 0.85);
    EXPECT_THROW(index.filter(kw("x", {1, 0})), Error);
    index.filter(kw("a", {1, 0, 0}));
    index.filter(kw("b", {0, 1, 0}));
    auto path = testsupport::scratch("kwindex") / "index.json";
    index.save(path);
    auto back = KeywordIndex::load(path);
    EXPECT_EQ(back->size(), 2u);
    EXPECT_EQ(back->tau(), 0.85);
    EXPECT_FALSE(back->filter(kw("a2", {1, 0, 0})).kept);
}

TEST(Keywords, HashingEmbedderBagOfWords) {
    HashingEmbedder e(256);
    auto a = e.embed("Qatar national climate change action plan");
    auto b = e.embed("QATAR climate national change plan action");
    EXPECT_NEAR(cosine(a, b), 1.0, 1e-12);
    EXPECT_NEAR(dot(a, a), 1.0, 1e-12);
    EXPECT_LT(cosine(a, e.embed("Doha coastal flooding")), 0.85);
    EXPECT_THROW(e.embed("  ,. "), Error);
}

TEST(Keywords, ExpansionUsesPlaces) {
    llm::ScriptedBackend b({{"keywords", std::string("Country: Qatar"), {R"(["Doha heat", "doha HEAT", "Doha floods"])"}}});
    std::vector<std::string> seeds{"heat"};
    std::vector<PlaceConstraint> places{{std::string("Qatar"), std::string("Doha")}};
    HashingEmbedder e(64);
    KeywordIndex index(64);
    auto x = expand_keywords(seeds, places, b, index, e);
    EXPECT_EQ(x.proposed, 3u);
    EXPECT_EQ(x.rejected, 1u);
    ASSERT_EQ(x.kept.size(), 2u);
    EXPECT_EQ(x.kept[0].country, "Qatar");
    EXPECT_EQ(parse_candidate_list("- one\n* two\n3. three\n"), (std::vector<std::string>{"one", "two", "three"}));
}

// chunking
TEST(Chunking, CoverageOverlapCount) {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 200; ++trial) {
        std::size_t T = 1 + rng() % 5000;
        auto spans = chunk_spans(T);
        std::size_t expect = (T > 512 ? (T - 512 + 383) / 384 : 0) + 1;
        ASSERT_EQ(spans.size(), expect) << T;
        EXPECT_EQ(spans.front().start, 0u);
        EXPECT_EQ(spans.back().start + spans.back().length, T);
        for (std::size_t k = 1; k < spans.size(); ++k) {
            EXPECT_EQ(spans[k - 1].start + spans[k - 1].length - spans[k].start, 128u);
        }
    }
}

TEST(Chunking, AlignmentSnapsBackToBreaks) {
    ChunkOptions o;
    o.align = true;
    auto spans = chunk_spans(1000, o, {370, 700});
    ASSERT_GE(spans.size(), 2u);
    EXPECT_EQ(spans[1].start, 370u);
    for (std::size_t k = 0; k + 1 < spans.size(); ++k)
        EXPECT_GE(spans[k].start + spans[k].length, spans[k + 1].start);  // still covers
    EXPECT_EQ(spans.back().start + spans.back().length, 1000u);
}

TEST(Chunking, DocumentChunkIds) {
    Document d;
    d.id = "doc-7";
    d.provenance.title = "t";
    std::string text;
    for (int k = 0; k < 600; ++k) text += "w" + std::to_string(k) + " ";
    d.clean_text = text;
    auto chunks = chunk_document(d);
    ASSERT_EQ(chunks.size(), 2u);
    EXPECT_EQ(chunks[1].id, "doc-7#1");
    EXPECT_EQ(chunks[1].tokens.front(), "w384");
    EXPECT_EQ(chunks[1].provenance.title, "t");
}

// document parsing
TEST(Documents, HtmlBoilerplateAndMetadata) {
    std::ifstream f(testsupport::fixtures() / "pages" / "heat.html");
    std::string raw((std::istreambuf_iterator<char>(f)), {});
    auto p = parse_document(raw, "html", "https://x");
    EXPECT_EQ(p.metadata.title, "Extreme heat and public health in Doha");
    EXPECT_EQ(p.metadata.organization, "Ministry of Public Health");
    EXPECT_EQ(p.metadata.date, "2023-09-05");
    EXPECT_EQ(p.clean_text.find("Contact us"), std::string::npos);
    EXPECT_EQ(p.clean_text.find("Copyright"), std::string::npos);
    EXPECT_EQ(p.clean_text.find("Share this page"), std::string::npos);
    EXPECT_NE(p.clean_text.find("## Working hours"), std::string::npos);
    EXPECT_NE(p.clean_text.find("14 heat-stress advisories"), std::string::npos);
}

TEST(Documents, PdfTextRunningHeadersAndPageNumbers) {
    std::ifstream f(testsupport::fixtures() / "pages" / "nccap.txt");
    std::string raw((std::istreambuf_iterator<char>(f)), {});
    auto p = parse_document(raw, "pdf_text");
    EXPECT_EQ(p.metadata.organization, "Ministry of Environment and Climate Change");
    EXPECT_EQ(p.metadata.date, "2021-10-25");
    EXPECT_EQ(p.clean_text.find("Qatar National Climate Change Action Plan\n"), std::string::npos);
    EXPECT_NE(p.clean_text.find("# 3 Adaptation Measures"), std::string::npos);
    EXPECT_EQ(p.clean_text.find("\n2\n"), std::string::npos);
}

TEST(Documents, Failures) {
    EXPECT_THROW(parse_document("%PDF-1.4 binary", "pdf"), Error);
    try {
        parse_document("<html><nav><a href='/'>Home</a></nav></html>", "html");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::EmptyAfterCleaning);
    }
}

// retrieval
TEST(Retrieval, RelevanceAndHosts) {
    Keyword k = kw("Doha extreme heat public health", {});
    EXPECT_DOUBLE_EQ(relevance_score(k, {"Extreme heat in Doha", "u", "public health advice"}), 1.0);
    EXPECT_DOUBLE_EQ(relevance_score(k, {"Doha hotels", "u", ""}), 0.2);
    EXPECT_EQ(url_host("https://www.moph.gov.qa/a?b"), "www.moph.gov.qa");
    EXPECT_TRUE(host_allowed("https://www.moph.gov.qa/a", {"gov.qa"}));
    EXPECT_FALSE(host_allowed("https://evilgov.qa/a", {"gov.qa"}));
    EXPECT_TRUE(host_allowed("https://any.example", {}));
}

TEST(Retrieval, RefinesThenGivesUp) {
    StaticSearch s;
    s.by_query["doha heat"] = {{"Cheap flights", "https://a.example/1", "book now"}};
    s.by_query["doha heat study"] = {{"Doha heat study", "https://b.example/2", ""}};
    StaticFetcher f;
    llm::ScriptedBackend refine({{"refine", std::nullopt, {R"({"query": "doha heat study"})"}, true}});
    RetrievalOptions o;
    o.retrieved_at = core::normalize_timestamp("2023-04-15");
    auto docs = retrieve_documents(kw("doha heat", {}), s, f, &refine, o);
    ASSERT_EQ(docs.size(), 1u);
    EXPECT_EQ(docs[0].provenance.trace, (std::vector<std::string>{"doha heat", "doha heat study"}));
    EXPECT_EQ(docs[0].provenance.retrieved_at, o.retrieved_at);
    try {
        retrieve_documents(kw("mangroves", {}), s, f, &refine, o);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NoRelevantResults);
    }
}

// facts and QA
TEST(Facts, Atomicity) {
    EXPECT_TRUE(acceptable_fact("The plan lists 35 mitigation measures."));
    EXPECT_FALSE(acceptable_fact("Heat rose in July, and visits doubled in August."));
    EXPECT_FALSE(acceptable_fact("Heat rose. Visits doubled."));
    EXPECT_FALSE(acceptable_fact("It rose; it fell."));
    FactOptions tiny;
    tiny.max_words = 3;
    EXPECT_FALSE(acceptable_fact("The plan lists 35 measures.", tiny));
}

TEST(Facts, InductionKeepsPointers) {
    Chunk c;
    c.id = "doc-1#0";
    c.doc_id = "doc-1";
    c.tokens = {"Doha", "heat"};
    c.provenance.title = "t";
    llm::ScriptedBackend b({{"facts", std::nullopt,
                             {R"(["Doha issued 14 advisories.", {"statement": "Bad ref.", "chunk_ref": "doc-2#0"},
                                  "A, and B happened."])"}}});
    auto fi = induce_facts(c, b);
    ASSERT_EQ(fi.facts.size(), 1u);
    EXPECT_EQ(fi.facts[0].id, "doc-1#0/f0");
    EXPECT_EQ(fi.facts[0].chunk_ref, "doc-1#0");
    EXPECT_EQ(fi.dropped, 2u);
}

TEST(QA, StructuralRules) {
    QAItem q;
    q.format = QAFormat::mcq;
    q.question = "Q?";
    q.answer = "b";
    q.options = {"a", "b", "c"};
    q.evidence = {"f"};
    EXPECT_TRUE(validate_qa_item(q, {}));
    q.options = {"a", "c", "d"};
    EXPECT_FALSE(validate_qa_item(q, {}));
    q.options = {"a", "b", "b"};
    EXPECT_FALSE(validate_qa_item(q, {}));
    q.options = {"a", "b", "c"};
    q.evidence.clear();
    EXPECT_FALSE(validate_qa_item(q, {}));
    QAItem tf;
    tf.format = QAFormat::tf;
    tf.question = "S.";
    tf.answer = "maybe";
    tf.evidence = {"f"};
    EXPECT_FALSE(validate_qa_item(tf, {}));
    QAItem open;
    open.format = QAFormat::open;
    open.question = "Q?";
    open.evidence = {"f"};
    open.answer = std::string(50, 'x');
    EXPECT_TRUE(validate_qa_item(open, {}));
    for (int k = 0; k < 41; ++k) open.answer += " w";
    EXPECT_FALSE(validate_qa_item(open, {}));
}

TEST(QA, TfBatchNeedsBothSides) {
    AtomicFact f{"doc-1#0/f0", "Doha issued 14 advisories.", "doc-1#0", {}};
    llm::ScriptedBackend only_true({{"qa", std::nullopt, {R"([{"question": "Doha issued 14.", "answer": true}])"}}});
    auto r = synthesize_qa(std::span<const AtomicFact>(&f, 1), QAFormat::tf, only_true);
    EXPECT_TRUE(r.items.empty());
    EXPECT_EQ(r.dropped, 1u);
    llm::ScriptedBackend pair({{"qa", std::nullopt,
                                {R"([{"question": "Doha issued 14.", "answer": true},
                                     {"question": "Doha issued 3.", "answer": "False"}])"}}});
    auto ok = synthesize_qa(std::span<const AtomicFact>(&f, 1), QAFormat::tf, pair);
    ASSERT_EQ(ok.items.size(), 2u);
    EXPECT_EQ(ok.items[1].answer, "false");
    EXPECT_EQ(ok.items[0].evidence, std::vector<std::string>{"doc-1#0/f0"});
}

TEST(QA, ItemJsonRoundTrip) {
    QAItem q;
    q.id = "x";
    q.format = QAFormat::mcq;
    q.question = "Q";
    q.answer = "a";
    q.options = {"a", "b", "c"};
    q.evidence = {"e"};
    q.split = Split::visual;
    q.category = "anomaly";
    q.gold_value = 3.0;
    EXPECT_EQ(QAItem::from_json(q.to_json()).to_json(), q.to_json());
}

TEST(TextPipeline, FixtureCorpus) {
    auto root = testsupport::fixtures();
    tools::FixtureSearchProvider search(root / "search.jsonl");
    tools::FixturePageFetcher pages(root / "pages");
    auto backend = llm::ScriptedBackend::load(root / "replays" / "text.json");
    HashingEmbedder e(256);
    KeywordIndex index(256);
    TextPipelineConfig cfg;
    cfg.seeds = {"extreme heat", "climate policy", "coastal flooding"};
    cfg.places = {{std::string("Qatar"), std::string("Doha")}, {std::string("UAE"), std::string("Abu Dhabi")}};
    cfg.retrieval.retrieved_at = core::normalize_timestamp("2023-04-15");
    auto ds = run_text_pipeline(cfg, search, pages, backend, index, e);
    EXPECT_EQ(ds.counters["keywords_rejected"], 2u);
    EXPECT_EQ(ds.counters["retrieval_misses"], 1u);
    EXPECT_EQ(ds.documents.size(), 3u);
    EXPECT_EQ(ds.chunks.size(), 4u);
    EXPECT_EQ(ds.facts.size(), 7u);
    EXPECT_EQ(ds.counters["facts_dropped"], 2u);
    EXPECT_EQ(ds.items.size(), 25u);
    EXPECT_TRUE(validate_evidence_chain(ds).empty());
    for (const auto& it : ds.items) EXPECT_TRUE(validate_qa_item(it, cfg.qa));
    // coastal document came through a refined query
    const auto& coast = ds.documents[2].provenance;
    EXPECT_EQ(coast.trace.size(), 2u);
    auto out = testsupport::scratch("textds");
    write_text_dataset(ds, out);
    for (const char* f : {"items.jsonl", "facts.jsonl", "chunks.jsonl", "documents.jsonl", "counters.json"})
        EXPECT_TRUE(std::filesystem::exists(out / f)) << f;
}

TEST(TextPipeline, BrokenChainIsReported) {
    TextDataset ds;
    QAItem q;
    q.id = "q";
    q.evidence = {"missing/f0"};
    ds.items.push_back(q);
    EXPECT_FALSE(validate_evidence_chain(ds).empty());
}
