#pragma once

#include <chrono>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "climagent/llm/backend.hpp"
#include "climagent/toolkit/registry.hpp"
#include "climagent/tools/analysis.hpp"
#include "climagent/tools/providers.hpp"

namespace climagent::tools {

/// Shared implementation behind a group of tools.
enum class Family {
    geocode,
    point_inquiry,
    forecast,
    range_analysis,
    satellite_image,
    spectral_index,
    desertification,
    carbon,
    search,
    summarize,
    detect,
};

std::string_view to_string(Family f);
std::optional<Family> parse_family(std::string_view s);

struct CatalogEntry {
    toolkit::ToolSignature signature;
    Family family;
    std::string dataset;                 // provider dataset or detector name
    std::vector<std::string> variables;  // variables reported; empty = all
};

/// The 22 tools, in name order.
const std::vector<CatalogEntry>& tool_catalog();
const CatalogEntry* find_catalog_entry(std::string_view tool);

struct ManifestEntry {
    std::string tool;
    Family family;
    std::string dataset;
    bool enabled = true;
    std::optional<std::chrono::milliseconds> timeout;
};

/// Enabled tools and their provider bindings. JSON form:
///   {"format": "tool-manifest/1",
///    "tools": [{"tool": "rain_inquiry", "family": "point_inquiry",
///               "dataset": "rain", "enabled": true, "timeout_ms": 30000}]}
/// Families must agree with the catalog; datasets may be rebound.
struct ToolManifest {
    std::vector<ManifestEntry> tools;

    static ToolManifest defaults();  // all 22 tools enabled
    static ToolManifest from_json(const nlohmann::json& j);
    static ToolManifest load_file(const std::filesystem::path& path);
    nlohmann::json to_json() const;
};

struct SuiteOptions {
    AnalysisConfig analysis;
    double degradation_threshold = -0.1;
    std::size_t search_results = 5;
    std::size_t summary_word_budget = 80;
    /// Backend behind `summarize`; the tool fails with ProviderFailure without one.
    std::shared_ptr<llm::Backend> summarizer;
    std::chrono::milliseconds default_timeout{30000};
};

/// Binds every enabled manifest entry to an executor over `providers`.
/// Tools whose provider is absent stay registered and fail at execution
/// with ProviderFailure.
toolkit::ToolRegistry build_registry(const ToolManifest& manifest, const ProviderSet& providers,
                                     const SuiteOptions& options = {});

}  // namespace climagent::tools
