#include "climagent/cli/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <openssl/evp.h>

#include "climagent/core/error.hpp"
#include "climagent/core/time.hpp"
#include "climagent/eval/harness.hpp"
#include "climagent/toolkit/observation.hpp"
#include "climagent/tools/suite.hpp"

namespace climagent::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "0.1.0";

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorCode::ConfigError, msg); }

fs::path resolve(const fs::path& base, const std::string& p) {
    fs::path path(p);
    return path.is_absolute() || base.empty() ? path : base / path;
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key) || j[key].is_null()) return fallback;
    try {
        return j[key].get<T>();
    } catch (const json::exception&) {
        config_error(fmt::format("config field '{}' has the wrong type", key));
    }
}

std::vector<std::string> strings(const json& j, const char* key) {
    if (!j.contains(key)) return {};
    if (!j[key].is_array()) config_error(fmt::format("config field '{}' must be an array", key));
    std::vector<std::string> out;
    for (const auto& e : j[key]) {
        if (!e.is_string()) config_error(fmt::format("config field '{}' must hold strings", key));
        out.push_back(e.get<std::string>());
    }
    return out;
}

std::vector<textforge::QAFormat> formats_from(const std::vector<std::string>& names) {
    std::vector<textforge::QAFormat> out;
    for (const auto& n : names) {
        auto f = textforge::parse_qa_format(n);
        if (!f) config_error("unknown QA format '" + n + "'");
        out.push_back(*f);
    }
    return out;
}

textforge::PlaceConstraint parse_place(const std::string& text) {
    // "Country/City", "Country" or "/City"
    textforge::PlaceConstraint p;
    auto slash = text.find('/');
    auto country = text.substr(0, slash);
    if (!country.empty()) p.country = country;
    if (slash != std::string::npos && slash + 1 < text.size()) p.city = text.substr(slash + 1);
    return p;
}

std::string join(const std::vector<std::string>& v, std::string_view sep) {
    std::string out;
    for (const auto& s : v) out += (out.empty() ? "" : std::string(sep)) + s;
    return out;
}

void write_file(const fs::path& p, const std::string& body) {
    std::error_code ec;
    if (p.has_parent_path()) fs::create_directories(p.parent_path(), ec);
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::SinkFailure, "cannot write " + p.string());
    out << body;
    if (!out) throw Error(ErrorCode::SinkFailure, "write failed for " + p.string());
}

}  // namespace

RunConfig RunConfig::from_json(const json& j, const fs::path& base) {
    if (!j.is_object()) config_error("config must be a JSON object");
    if (j.value("format", "") != "run-config/1") config_error("config format must be run-config/1");
    RunConfig c;
    if (j.contains("manifest")) c.manifest = resolve(base, get_or<std::string>(j, "manifest", ""));
    if (j.contains("backend")) {
        const auto& b = j["backend"];
        if (!b.is_object()) config_error("backend must be an object");
        c.backend = get_or<std::string>(b, "kind", "scripted");
        if (b.contains("replay")) c.replay = resolve(base, get_or<std::string>(b, "replay", ""));
        c.remote.endpoint = get_or<std::string>(b, "endpoint", "");
        c.remote.model = get_or<std::string>(b, "model", "");
        c.remote.api_key_env = get_or<std::string>(b, "api_key_env", "");
        c.remote.timeout = std::chrono::seconds(get_or<long>(b, "timeout_seconds", 60));
        c.remote.temperature = get_or<double>(b, "temperature", 0.0);
    }
    if (j.contains("providers")) {
        const auto& p = j["providers"];
        if (!p.is_object()) config_error("providers must be an object");
        c.mode = get_or<std::string>(p, "mode", "fixture");
        if (p.contains("fixture_root")) c.fixture_root = resolve(base, get_or<std::string>(p, "fixture_root", ""));
        c.live.geocoding_url = get_or<std::string>(p, "geocoding_url", c.live.geocoding_url);
        c.live.archive_url = get_or<std::string>(p, "archive_url", c.live.archive_url);
        c.live.forecast_url = get_or<std::string>(p, "forecast_url", c.live.forecast_url);
        c.live.air_quality_url = get_or<std::string>(p, "air_quality_url", c.live.air_quality_url);
        c.live.flood_url = get_or<std::string>(p, "flood_url", c.live.flood_url);
        c.live.search_url = get_or<std::string>(p, "search_url", "");
        c.live.timeout = std::chrono::seconds(get_or<long>(p, "timeout_seconds", 20));
        if (p.contains("today")) {
            try {
                c.live.today = core::parse_date(get_or<std::string>(p, "today", ""));
            } catch (const Error& e) {
                config_error(std::string("providers.today: ") + e.what());
            }
        }
    }
    c.output_dir = resolve(base, get_or<std::string>(j, "output_dir", "out"));
    c.seed = get_or<std::uint64_t>(j, "seed", 0);
    if (j.contains("agent")) {
        const auto& a = j["agent"];
        c.agent.budget = get_or<int>(a, "budget", c.agent.budget);
        c.agent.max_consecutive_failures = get_or<int>(a, "max_consecutive_failures", c.agent.max_consecutive_failures);
        c.agent.observation_byte_cap = get_or<std::size_t>(a, "observation_byte_cap", c.agent.observation_byte_cap);
        c.agent.images = get_or<bool>(a, "images", false);
        c.agent.numeric_tolerance = get_or<double>(a, "numeric_tolerance", c.agent.numeric_tolerance);
    }
    if (j.contains("text")) {
        const auto& t = j["text"];
        c.text_seeds = strings(t, "seeds");
        for (const auto& p : strings(t, "places")) c.text_places.push_back(parse_place(p));
        c.tau = get_or<double>(t, "tau", c.tau);
        c.embedding_dimension = get_or<std::size_t>(t, "embedding_dimension", c.embedding_dimension);
        if (t.contains("formats")) c.text.formats = formats_from(strings(t, "formats"));
        c.text.retrieval.max_rounds = get_or<std::size_t>(t, "max_rounds", c.text.retrieval.max_rounds);
        c.text.retrieval.results_per_round = get_or<std::size_t>(t, "results_per_round", c.text.retrieval.results_per_round);
        c.text.retrieval.relevance_threshold = get_or<double>(t, "relevance_threshold", c.text.retrieval.relevance_threshold);
        c.text.retrieval.domain_allowlist = strings(t, "domain_allowlist");
        c.text.chunking.window = get_or<std::size_t>(t, "window", c.text.chunking.window);
        c.text.chunking.stride = get_or<std::size_t>(t, "stride", c.text.chunking.stride);
        c.text.chunking.align = get_or<bool>(t, "align", c.text.chunking.align);
        c.text.chunking.snap = get_or<std::size_t>(t, "snap", c.text.chunking.snap);
        c.text.qa.open_answer_word_budget = get_or<std::size_t>(t, "open_answer_word_budget", c.text.qa.open_answer_word_budget);
    }
    if (j.contains("visual")) {
        const auto& v = j["visual"];
        if (v.contains("product")) c.product = resolve(base, get_or<std::string>(v, "product", ""));
        if (v.contains("cities_file")) c.cities = resolve(base, get_or<std::string>(v, "cities_file", ""));
        c.visual.cities = strings(v, "cities");
        c.visual.variables = strings(v, "variables");
        if (v.contains("metric")) {
            auto name = get_or<std::string>(v, "metric", "");
            auto metric = geoforge::parse_metric(name);
            if (!metric) config_error("unknown distance metric '" + name + "'");
            c.visual.metric = *metric;
        }
        c.visual.delta_days = get_or<int>(v, "delta_days", c.visual.delta_days);
        c.visual.rho = get_or<double>(v, "rho", c.visual.rho);
        c.visual.years = get_or<int>(v, "years", c.visual.years);
        c.visual.window_limit = get_or<std::size_t>(v, "window_limit", c.visual.window_limit);
        if (v.contains("categories")) {
            c.visual.categories.clear();
            for (const auto& name : strings(v, "categories")) {
                auto cat = geoforge::parse_visual_category(name);
                if (!cat) config_error("unknown visual category '" + name + "'");
                c.visual.categories.push_back(*cat);
            }
        }
        if (v.contains("formats")) c.visual.formats = formats_from(strings(v, "formats"));
        c.visual.qa.spike_sigmas = get_or<double>(v, "spike_sigmas", c.visual.qa.spike_sigmas);
        c.visual.qa.mask_fraction = get_or<double>(v, "mask_fraction", c.visual.qa.mask_fraction);
    }
    return c;
}

RunConfig RunConfig::load(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) config_error("cannot read config " + path.string());
    auto j = json::parse(in, nullptr, false);
    if (j.is_discarded()) config_error(path.string() + " is not valid JSON");
    return from_json(j, path.parent_path());
}

json RunConfig::to_json() const {
    auto opt_path = [](const std::optional<fs::path>& p) { return p ? json(p->generic_string()) : json(); };
    json places = json::array();
    for (const auto& p : text_places) places.push_back(p.country.value_or("") + "/" + p.city.value_or(""));
    json text_formats = json::array();
    for (auto f : text.formats) text_formats.push_back(textforge::to_string(f));
    json visual_formats = json::array();
    for (auto f : visual.formats) visual_formats.push_back(textforge::to_string(f));
    json categories = json::array();
    for (auto c : visual.categories) categories.push_back(geoforge::to_string(c));
    json backend_json{{"kind", backend}, {"replay", opt_path(replay)}};
    if (backend == "remote")
        backend_json.update({{"endpoint", remote.endpoint},
                             {"model", remote.model},
                             {"api_key_env", remote.api_key_env},
                             {"timeout_seconds", remote.timeout.count()},
                             {"temperature", remote.temperature}});
    json providers{{"mode", mode}, {"fixture_root", opt_path(fixture_root)}};
    if (mode == "live")
        providers.update({{"geocoding_url", live.geocoding_url},
                          {"archive_url", live.archive_url},
                          {"forecast_url", live.forecast_url},
                          {"air_quality_url", live.air_quality_url},
                          {"flood_url", live.flood_url},
                          {"search_url", live.search_url},
                          {"timeout_seconds", live.timeout.count()},
                          {"today", live.today ? json(core::format_date(*live.today)) : json()}});
    return {{"format", "run-config/1"},
            {"manifest", opt_path(manifest)},
            {"backend", backend_json},
            {"providers", providers},
            {"output_dir", output_dir.generic_string()},
            {"seed", seed},
            {"agent",
             {{"budget", agent.budget},
              {"max_consecutive_failures", agent.max_consecutive_failures},
              {"observation_byte_cap", agent.observation_byte_cap},
              {"images", agent.images},
              {"numeric_tolerance", agent.numeric_tolerance}}},
            {"text",
             {{"seeds", text_seeds},
              {"places", places},
              {"tau", tau},
              {"embedding_dimension", embedding_dimension},
              {"formats", text_formats},
              {"max_rounds", text.retrieval.max_rounds},
              {"results_per_round", text.retrieval.results_per_round},
              {"relevance_threshold", text.retrieval.relevance_threshold},
              {"domain_allowlist", text.retrieval.domain_allowlist},
              {"window", text.chunking.window},
              {"stride", text.chunking.stride},
              {"align", text.chunking.align},
              {"snap", text.chunking.snap},
              {"open_answer_word_budget", text.qa.open_answer_word_budget}}},
            {"visual",
             {{"product", opt_path(product)},
              {"cities_file", opt_path(cities)},
              {"cities", visual.cities},
              {"variables", visual.variables},
              {"metric", geoforge::to_string(visual.metric)},
              {"delta_days", visual.delta_days},
              {"rho", visual.rho},
              {"years", visual.years},
              {"window_limit", visual.window_limit},
              {"categories", categories},
              {"formats", visual_formats},
              {"spike_sigmas", visual.qa.spike_sigmas},
              {"mask_fraction", visual.qa.mask_fraction}}}};
}

void RunConfig::validate() const {
    if (mode != "fixture" && mode != "live") config_error("provider mode must be fixture or live");
    if (mode == "fixture" && !fixture_root) config_error("fixture mode requires fixture_root");
    if (backend != "scripted" && backend != "remote" && backend != "none")
        config_error("backend kind must be scripted, remote or none");
    if (backend == "scripted" && !replay) config_error("scripted backend requires a replay file");
    if (backend == "remote" && (remote.endpoint.empty() || remote.model.empty()))
        config_error("remote backend requires endpoint and model");
    if (agent.budget < 1) config_error("agent budget must be at least 1");
}

std::string config_hash(const json& config) {
    auto text = config.dump();
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(text.data(), text.size(), md, &len, EVP_sha256(), nullptr);
    std::string hex;
    for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", md[i]);
    return hex;
}

namespace {

struct Session {
    RunConfig config;
    std::shared_ptr<llm::Backend> backend;
    tools::ProviderSet providers;
    toolkit::ToolRegistry registry;
};

std::shared_ptr<llm::Backend> make_backend(const RunConfig& c) {
    if (c.backend == "scripted") {
        if (!fs::exists(*c.replay)) config_error("replay file not found: " + c.replay->string());
        return std::make_shared<llm::ScriptedBackend>(llm::ScriptedBackend::load(*c.replay));
    }
    if (c.backend == "remote") return std::make_shared<llm::RemoteChatBackend>(c.remote);
    return nullptr;
}

Session open_session(const RunConfig& c, bool need_backend) {
    c.validate();
    Session s;
    s.config = c;
    if (need_backend && c.backend == "none") config_error("this command needs an LLM backend");
    s.backend = make_backend(c);
    if (c.mode == "fixture") {
        if (!fs::exists(*c.fixture_root / "fixture.json"))
            config_error("fixture root lacks fixture.json: " + c.fixture_root->string());
        s.providers = tools::load_fixture_providers(*c.fixture_root);
    } else {
        std::optional<tools::ProviderSet> fallback;
        if (c.fixture_root) fallback = tools::load_fixture_providers(*c.fixture_root);
        s.providers = tools::make_live_providers(c.live, fallback ? &*fallback : nullptr);
    }
    auto manifest = c.manifest ? tools::ToolManifest::load_file(*c.manifest) : tools::ToolManifest::defaults();
    tools::SuiteOptions opts;
    opts.summarizer = s.backend;
    s.registry = tools::build_registry(manifest, s.providers, opts);
    return s;
}

void write_run_manifest(const Session& s, const std::string& command, const std::vector<std::string>& args,
                        const std::vector<std::string>& outputs) {
    auto cfg = s.config.to_json();
    json m{{"format", "run-manifest/1"},
           {"command", command},
           {"args", args},
           {"version", kVersion},
           {"config_sha256", config_hash(cfg)},
           {"config", cfg},
           {"backend", s.backend ? s.backend->describe() : "none"},
           {"provider_mode", s.providers.mode},
           {"tools", s.registry.size()},
           {"outputs", outputs}};
    write_file(s.config.output_dir / (command + "_manifest.json"), m.dump(2) + "\n");
}

std::string describe_call(const toolkit::ToolCall& call) {
    std::vector<std::string> parts;
    for (const auto& [k, v] : call.args) parts.push_back(k + "=" + v);
    return call.tool + "(" + join(parts, ", ") + ")";
}

int cmd_ask(Session& s, const std::string& query, const std::vector<std::string>& args, std::ostream& out) {
    auto result = agent::run(query, s.registry, *s.backend, s.config.agent);
    const auto& ans = result.answer;
    const auto& dir = s.config.output_dir;
    std::vector<std::string> outputs{"trajectory.json", "answer.json"};
    write_file(dir / "trajectory.json", result.trajectory.to_json().dump(2) + "\n");
    write_file(dir / "answer.json", ans.to_json().dump(2) + "\n");
    for (const auto& c : ans.charts) {
        write_file(dir / "charts" / (c.id + ".svg"), c.svg);
        outputs.push_back("charts/" + c.id + ".svg");
    }
    write_run_manifest(s, "ask", args, outputs);

    out << (ans.text.empty() ? std::string("(no answer)") : ans.text) << "\n";
    if (!ans.citations.empty()) {
        out << "\nSources:\n";
        for (int n : ans.citations) {
            const auto& st = result.trajectory.steps.at(static_cast<std::size_t>(n - 1));
            out << "  [" << n << "] " << (st.call ? describe_call(*st.call) : st.kind) << "\n";
        }
    }
    for (const auto& c : ans.charts) out << "Chart: " << (dir / "charts" / (c.id + ".svg")).generic_string() << "\n";
    bool flagged = ans.incomplete || ans.ungrounded;
    if (ans.incomplete) out << "Flag: incomplete (" << result.trajectory.termination << ")\n";
    if (ans.ungrounded) out << "Flag: ungrounded numbers: " << join(ans.ungrounded_numbers, ", ") << "\n";
    out << "Trajectory: " << (dir / "trajectory.json").generic_string() << "\n";
    return flagged ? kExitFlagged : kExitOk;
}

int cmd_bench(Session& s, const fs::path& instances_path, const std::string& mode, bool images, bool gold,
              const std::vector<std::string>& args, std::ostream& out) {
    if (mode != "step" && mode != "e2e") config_error("bench mode must be step or e2e");
    auto instances = eval::load_instances(instances_path);
    if (instances.empty()) throw Error(ErrorCode::InvalidArgument, "instance file has no instances");
    std::shared_ptr<llm::Backend> backend = s.backend;
    if (gold) backend = std::make_shared<llm::ScriptedBackend>(eval::make_gold_replay(instances));
    if (!backend) config_error("bench needs a backend or --gold");
    eval::HarnessOptions opts;
    opts.agent = s.config.agent;
    opts.images = images;
    auto report = mode == "step" ? eval::run_step_mode(instances, *backend, s.registry, opts)
                                 : eval::run_e2e_mode(instances, *backend, s.registry, opts);
    auto stem = s.config.output_dir / ("bench_" + mode);
    fs::create_directories(s.config.output_dir);
    eval::write_report(report, stem);
    write_run_manifest(s, "bench", args, {"bench_" + mode + ".txt", "bench_" + mode + ".csv"});
    out << eval::render_report(report);
    return kExitOk;
}

int cmd_forge_text(Session& s, const std::optional<fs::path>& index_path, const std::vector<std::string>& args,
                   std::ostream& out, std::ostream& err) {
    auto& c = s.config;
    if (c.text_seeds.empty()) config_error("forge text needs seed topics (--topic or text.seeds)");
    if (!s.providers.search || !s.providers.pages) config_error("forge text needs search and page providers");
    textforge::HashingEmbedder embedder(c.embedding_dimension);
    std::unique_ptr<textforge::KeywordIndex> index;
    if (index_path && fs::exists(*index_path)) index = textforge::KeywordIndex::load(*index_path);
    else index = std::make_unique<textforge::KeywordIndex>(c.embedding_dimension, c.tau);

    auto cfg = c.text;
    cfg.seeds = c.text_seeds;
    cfg.places = c.text_places;
    if (s.providers.observations)
        cfg.retrieval.retrieved_at = core::Instant(s.providers.observations->today());
    auto ds = textforge::run_text_pipeline(cfg, *s.providers.search, *s.providers.pages, *s.backend, *index, embedder);
    auto dir = c.output_dir / "text";
    textforge::write_text_dataset(ds, dir);
    index->save(index_path ? *index_path : dir / "keyword_index.json");
    write_run_manifest(s, "forge_text", args,
                       {"text/items.jsonl", "text/facts.jsonl", "text/chunks.jsonl", "text/documents.jsonl",
                        "text/counters.json"});

    auto problems = textforge::validate_evidence_chain(ds);
    std::size_t invalid = 0;
    for (const auto& item : ds.items)
        if (!textforge::validate_qa_item(item, cfg.qa)) ++invalid;
    for (const auto& [k, v] : ds.counters) out << fmt::format("{:<20} {}\n", k, v);
    out << "dataset: " << dir.generic_string() << "\n";
    for (const auto& p : problems) err << "evidence: " << p << "\n";
    return problems.empty() && invalid == 0 ? kExitOk : kExitFlagged;
}

int cmd_forge_visual(Session& s, const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    auto& c = s.config;
    if (!c.product) config_error("forge visual needs a gridded product (--product or visual.product)");
    if (c.visual.cities.empty()) config_error("forge visual needs at least one city");
    std::optional<geoforge::CityInventory> owned;
    const geoforge::CityInventory* inventory = nullptr;
    if (c.cities) {
        owned = geoforge::CityInventory::load_file(*c.cities);
        inventory = &*owned;
    } else if (auto geo = std::dynamic_pointer_cast<const tools::InventoryGeocoder>(s.providers.geocoder)) {
        inventory = &geo->inventory();
    } else {
        config_error("forge visual needs a city inventory (visual.cities_file or a fixture root)");
    }
    auto product = geoforge::GriddedProduct::load_file(*c.product);
    auto cfg = c.visual;
    cfg.qa.seed = c.seed;
    auto ds = geoforge::run_visual_pipeline(product, *inventory, cfg, s.backend.get());
    auto dir = c.output_dir / "visual";
    geoforge::write_visual_dataset(ds, dir);
    write_run_manifest(s, "forge_visual", args,
                       {"visual/charts/metadata.csv", "visual/items.jsonl", "visual/counters.json"});
    auto problems = geoforge::validate_visual_dataset(ds, cfg.qa.validation);
    for (const auto& cc : ds.cells)
        out << fmt::format("{} ({}) -> cell ({}, {})\n", cc.city, cc.country, cc.cell.i, cc.cell.j);
    for (const auto& [k, v] : ds.counters) out << fmt::format("{:<20} {}\n", k, v);
    out << "dataset: " << dir.generic_string() << "\n";
    for (const auto& p : problems) err << "invalid: " << p << "\n";
    return problems.empty() ? kExitOk : kExitFlagged;
}

int cmd_tools_list(const toolkit::ToolRegistry& registry, std::ostream& out) {
    std::size_t categories = 0;
    for (auto cat : toolkit::kCategoryOrder) {
        auto view = registry.restricted_to({cat});
        if (view.empty()) continue;
        ++categories;
        out << toolkit::category_title(cat) << "\n";
        for (const auto* sig : view.signatures()) {
            std::vector<std::string> params;
            for (const auto& p : sig->params)
                params.push_back(p.name + (p.required ? "" : "?") + ": " + std::string(toolkit::to_string(p.type)));
            out << fmt::format("  {}({}) -> {}\n", sig->name, join(params, ", "), toolkit::to_string(sig->returns));
        }
    }
    out << registry.size() << " tools in " << categories << " categories\n";
    return kExitOk;
}

int cmd_tools_call(const toolkit::ToolRegistry& registry, const std::string& tool, const std::vector<std::string>& kv,
                   std::ostream& out, std::ostream& err) {
    toolkit::ToolCall call;
    call.tool = tool;
    for (const auto& a : kv) {
        auto eq = a.find('=');
        if (eq == std::string::npos || eq == 0) {
            err << "argument '" << a << "' is not name=value\n";
            return kExitInput;
        }
        call.args[a.substr(0, eq)] = a.substr(eq + 1);
    }
    auto verdict = toolkit::validate_call(call, registry);
    if (!verdict.ok()) {
        err << verdict.describe() << "\n";
        return kExitInput;
    }
    auto obs = toolkit::execute(call, registry);
    out << obs.to_json().dump(2) << "\n";
    return obs.status.ok ? kExitOk : kExitFlagged;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Gulf climate agent: ask, benchmark, forge datasets, call tools"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    std::string config_path, replay, fixture_root, mode, output_dir, manifest;
    std::optional<std::uint64_t> seed;
    std::optional<int> budget;
    app.add_option("-c,--config", config_path, "run-config/1 JSON file");
    app.add_option("--replay", replay, "scripted replay file (selects the scripted backend)");
    app.add_option("--fixture-root", fixture_root, "fixture root directory");
    app.add_option("--mode", mode, "provider mode")->check(CLI::IsMember({"fixture", "live"}));
    app.add_option("-o,--out", output_dir, "output directory");
    app.add_option("--manifest", manifest, "tool manifest JSON");
    app.add_option("--seed", seed, "random seed");
    app.add_option("--budget", budget, "agent step budget");

    auto* ask = app.add_subcommand("ask", "answer a question with the tool-using agent");
    std::string query;
    bool ask_images = false;
    ask->add_option("query", query, "question")->required();
    ask->add_flag("--images", ask_images, "render charts for series observations");

    auto* bench = app.add_subcommand("bench", "run the benchmark harness");
    std::string instances, bench_mode = "step";
    bool bench_images = false, gold = false;
    bench->add_option("instances", instances, "benchmark instances (JSONL)")->required();
    bench->add_option("--eval-mode", bench_mode, "step or e2e")->check(CLI::IsMember({"step", "e2e"}));
    bench->add_flag("--images", bench_images, "score AnsAcc+I");
    bench->add_flag("--gold", gold, "replay the gold traces instead of the configured backend");

    auto* forge = app.add_subcommand("forge", "build QA datasets");
    forge->require_subcommand(1);
    auto* forge_text = forge->add_subcommand("text", "textual pipeline");
    std::vector<std::string> topics, places;
    std::string index_path;
    forge_text->add_option("--topic", topics, "seed topic (repeatable)");
    forge_text->add_option("--place", places, "Country/City constraint (repeatable)");
    forge_text->add_option("--index", index_path, "persistent keyword index file");
    auto* forge_visual = forge->add_subcommand("visual", "visual-temporal pipeline");
    std::string product;
    std::vector<std::string> cities;
    std::optional<std::size_t> window_limit;
    forge_visual->add_option("--product", product, "gridded fixture product");
    forge_visual->add_option("--city", cities, "city query (repeatable)");
    forge_visual->add_option("--window-limit", window_limit, "most recent windows per series");

    auto* tools_cmd = app.add_subcommand("tools", "inspect or invoke tools");
    tools_cmd->require_subcommand(1);
    auto* list = tools_cmd->add_subcommand("list", "list registered tools");
    auto* call = tools_cmd->add_subcommand("call", "invoke one tool");
    std::string tool_name;
    std::vector<std::string> tool_args;
    call->add_option("tool", tool_name, "tool name")->required();
    call->add_option("args", tool_args, "name=value arguments");

    std::vector<std::string> argv{"climagent"};
    argv.insert(argv.end(), args.begin(), args.end());
    std::vector<const char*> cargv;
    for (const auto& a : argv) cargv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(cargv.size()), cargv.data());
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        RunConfig c = config_path.empty() ? RunConfig{} : RunConfig::load(config_path);
        if (!replay.empty()) {
            c.backend = "scripted";
            c.replay = replay;
        }
        if (!fixture_root.empty()) c.fixture_root = fixture_root;
        if (!mode.empty()) c.mode = mode;
        if (!output_dir.empty()) c.output_dir = output_dir;
        if (!manifest.empty()) c.manifest = manifest;
        if (seed) c.seed = *seed;
        if (budget) c.agent.budget = *budget;
        if (ask_images) c.agent.images = true;
        if (!topics.empty()) c.text_seeds = topics;
        if (!places.empty()) {
            c.text_places.clear();
            for (const auto& p : places) c.text_places.push_back(parse_place(p));
        }
        if (!product.empty()) c.product = product;
        if (!cities.empty()) c.visual.cities = cities;
        if (window_limit) c.visual.window_limit = *window_limit;

        bool tools_only = tools_cmd->parsed();
        bool bench_gold = bench->parsed() && gold;
        if ((tools_only || bench_gold || forge_visual->parsed()) && c.backend == "scripted" && !c.replay)
            c.backend = "none";
        auto s = open_session(c, !(tools_only || bench_gold || forge_visual->parsed()));

        if (ask->parsed()) return cmd_ask(s, query, args, out);
        if (bench->parsed()) return cmd_bench(s, instances, bench_mode, bench_images, gold, args, out);
        if (forge_text->parsed())
            return cmd_forge_text(s, index_path.empty() ? std::nullopt : std::optional<fs::path>(index_path), args,
                                  out, err);
        if (forge_visual->parsed()) return cmd_forge_visual(s, args, out, err);
        if (list->parsed()) return cmd_tools_list(s.registry, out);
        if (call->parsed()) return cmd_tools_call(s.registry, tool_name, tool_args, out, err);
    } catch (const Error& e) {
        err << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitInput;
}

}  // namespace climagent::cli
