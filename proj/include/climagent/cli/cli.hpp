#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "climagent/agent/agent.hpp"
#include "climagent/geoforge/pipeline.hpp"
#include "climagent/llm/backend.hpp"
#include "climagent/textforge/pipeline.hpp"
#include "climagent/tools/providers.hpp"

namespace climagent::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitFlagged = 2;

/// Operator configuration, file format "run-config/1". Relative paths in a
/// config file are resolved against the file's directory.
struct RunConfig {
    std::optional<std::filesystem::path> manifest;  // tool manifest; defaults to all 22 tools
    std::string backend = "scripted";               // scripted | remote | none
    std::optional<std::filesystem::path> replay;
    llm::RemoteConfig remote;
    std::string mode = "fixture";  // fixture | live
    std::optional<std::filesystem::path> fixture_root;
    tools::LiveConfig live;
    std::filesystem::path output_dir = "out";
    std::uint64_t seed = 0;
    agent::AgentOptions agent;

    // forge text
    std::vector<std::string> text_seeds;
    std::vector<textforge::PlaceConstraint> text_places;
    double tau = 0.85;
    std::size_t embedding_dimension = 256;
    textforge::TextPipelineConfig text;

    // forge visual
    std::optional<std::filesystem::path> product;
    std::optional<std::filesystem::path> cities;
    geoforge::VisualPipelineConfig visual;

    static RunConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
    static RunConfig load(const std::filesystem::path& path);
    nlohmann::json to_json() const;
    /// Throws ConfigError when mode or backend requirements are unmet.
    void validate() const;
};

/// Hex SHA-256 of the config's canonical JSON.
std::string config_hash(const nlohmann::json& config);

/// Full command line entry point; returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace climagent::cli
