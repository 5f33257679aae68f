#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "climagent/geoforge/chart.hpp"
#include "climagent/llm/backend.hpp"
#include "climagent/textforge/qa.hpp"

namespace climagent::geoforge {

enum class VisualCategory { anomaly, forecasting, imputation, reasoning };

std::string_view to_string(VisualCategory c);
std::optional<VisualCategory> parse_visual_category(std::string_view s);

struct VisualQAOptions {
    double spike_sigmas = 5.0;  // k
    double mask_fraction = 0.1;
    std::uint64_t seed = 0;
    std::size_t mcq_options = 4;
    textforge::QAOptions validation{};
};

/// A spike or drop planted into a copy of the chart's data.
struct InjectedAnomaly {
    std::size_t index = 0;  // record index within the artifact's data
    int day = 0;            // 1-based day within the window
    int direction = 1;      // +1 spike, -1 drop
    double original = 0.0;
    double injected = 0.0;
    double sigma = 0.0;
};

/// Seeded choice of an observed timestep and a k-sigma perturbation pushing
/// it further from the window mean. Zero-variance windows fall back to
/// sigma = max(0.1 * |mean|, 1).
InjectedAnomaly plan_anomaly(const ChartArtifact& artifact, double k, std::uint64_t seed);

struct MaskedSpan {
    std::size_t first = 0;  // record indices [first, last)
    std::size_t last = 0;
    double gold_mean = 0.0;
    double tolerance = 0.0;  // population std of the unmasked neighbourhood
};

/// Seeded contiguous mask covering mask_fraction of the window (at least one
/// record) that hides at least one observed value.
MaskedSpan plan_mask(const ChartArtifact& artifact, double fraction, std::uint64_t seed);

struct VisualQASynthesis {
    textforge::QASynthesis qa;
    /// Perturbed or masked charts referenced by items, as (filename, svg).
    std::vector<std::pair<std::string, std::string>> images;
};

/// Anomaly and imputation items are built without the backend; forecasting
/// and reasoning items come from the "visual_qa" channel conditioned on the
/// chart metadata and pass the same structural validation as text items.
VisualQASynthesis synthesize_visual_qa(const ChartArtifact& artifact, VisualCategory category,
                                       textforge::QAFormat format, llm::Backend* backend,
                                       const VisualQAOptions& options = {});

}  // namespace climagent::geoforge
