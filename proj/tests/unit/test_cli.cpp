#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "climagent/cli/cli.hpp"
#include "support.hpp"

using namespace climagent;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code;
    std::string out, err;
};

Outcome invoke(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string config() { return (testsupport::fixtures() / "run_config.json").string(); }

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), {}};
}

}  // namespace

TEST(Cli, ToolsList) {
    auto r = invoke({"-c", config(), "tools", "list"});
    EXPECT_EQ(r.code, cli::kExitOk) << r.err;
    EXPECT_NE(r.out.find("22 tools in 7 categories"), std::string::npos);
}

TEST(Cli, ToolsCallInvalidArgs) {
    auto r = invoke({"-c", config(), "tools", "call", "rain_inquiry", "lat=north"});
    EXPECT_EQ(r.code, cli::kExitInput);
    auto ok = invoke({"-c", config(), "tools", "call", "geocode_mapping", "region=Doha"});
    EXPECT_EQ(ok.code, cli::kExitOk) << ok.err;
    EXPECT_NE(ok.out.find("25.2"), std::string::npos) << ok.out;
}

TEST(Cli, MissingReplayIsInputError) {
    auto dir = testsupport::scratch("cli_missing");
    auto r = invoke({"-c", config(), "--replay", (dir / "nope.json").string(), "-o", dir.string(), "ask", "rain?"});
    EXPECT_EQ(r.code, cli::kExitInput);
    EXPECT_FALSE(r.err.empty());
}

TEST(Cli, BadInstanceFile) {
    auto dir = testsupport::scratch("cli_badinst");
    std::ofstream(dir / "bad.jsonl") << "{\"id\": 3}\n";
    auto r = invoke({"-c", config(), "-o", dir.string(), "bench", "--gold", (dir / "bad.jsonl").string()});
    EXPECT_EQ(r.code, cli::kExitInput);
}

TEST(Cli, UnknownSubcommand) {
    EXPECT_EQ(invoke({"forge", "audio"}).code, cli::kExitInput);
    EXPECT_EQ(invoke({"-c", config(), "--mode", "cloud", "tools", "list"}).code, cli::kExitInput);
}

TEST(Cli, ConfigHashStable) {
    auto c = cli::RunConfig::load(config());
    auto a = cli::config_hash(c.to_json());
    EXPECT_EQ(a, cli::config_hash(cli::RunConfig::load(config()).to_json()));
    EXPECT_EQ(a.size(), 64u);
    c.seed += 1;
    EXPECT_NE(a, cli::config_hash(c.to_json()));
}

TEST(Cli, AskWritesManifestAndFlags) {
    auto dir = testsupport::scratch("cli_ask");
    auto r = invoke({"-c", config(), "-o", dir.string(), "ask", "How much rain fell in Doha on 2023-04-15?"});
    ASSERT_EQ(r.code, cli::kExitOk) << r.err;
    EXPECT_NE(r.out.find("12.0 mm"), std::string::npos) << r.out;
    auto m = json::parse(slurp(dir / "ask_manifest.json"));
    EXPECT_EQ(m["format"], "run-manifest/1");
    EXPECT_EQ(m["config_sha256"].get<std::string>().size(), 64u);
    EXPECT_EQ(m["tools"], 22);

    auto probe = (testsupport::fixtures() / "replays" / "ungrounded_probe.json").string();
    auto d2 = testsupport::scratch("cli_probe");
    auto p = invoke({"-c", config(), "--replay", probe, "-o", d2.string(), "ask",
                  "How much rain fell in Doha on 2023-04-15?"});
    EXPECT_EQ(p.code, cli::kExitFlagged) << p.err;
}

TEST(Cli, ForgeOutputsDeterministic) {
    std::string text_cfg = (testsupport::fixtures() / "text_config.json").string();
    std::string vis_cfg = (testsupport::fixtures() / "visual_config.json").string();
    auto a = testsupport::scratch("cli_forge_a");
    auto b = testsupport::scratch("cli_forge_b");
    for (const auto& d : {a, b}) {
        ASSERT_EQ(invoke({"-c", text_cfg, "-o", d.string(), "forge", "text"}).code, cli::kExitOk);
        ASSERT_EQ(invoke({"-c", vis_cfg, "-o", d.string(), "forge", "visual"}).code, cli::kExitOk);
    }
    for (const char* f : {"text/items.jsonl", "text/facts.jsonl", "visual/items.jsonl", "visual/charts/metadata.csv"}) {
        auto x = slurp(a / f);
        EXPECT_FALSE(x.empty()) << f;
        EXPECT_EQ(x, slurp(b / f)) << f;
    }
    EXPECT_TRUE(fs::exists(a / "forge_text_manifest.json"));
    EXPECT_TRUE(fs::exists(a / "forge_visual_manifest.json"));
}
