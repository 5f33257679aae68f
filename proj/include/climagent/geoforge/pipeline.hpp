#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "climagent/geoforge/chart.hpp"
#include "climagent/geoforge/cities.hpp"
#include "climagent/geoforge/grid.hpp"
#include "climagent/geoforge/gridded.hpp"
#include "climagent/geoforge/visual_qa.hpp"
#include "climagent/geoforge/windows.hpp"

namespace climagent::geoforge {

struct VisualPipelineConfig {
    std::vector<std::string> cities;     // inventory queries, e.g. "Doha, Qatar"
    std::vector<std::string> variables;  // empty: every product variable
    DistanceMetric metric = DistanceMetric::spherical;
    int delta_days = 90;
    double rho = 0.8;
    int years = 10;
    /// Keep only the most recent N kept windows per series; 0 keeps all.
    std::size_t window_limit = 0;
    std::vector<VisualCategory> categories{VisualCategory::anomaly, VisualCategory::forecasting,
                                           VisualCategory::imputation, VisualCategory::reasoning};
    std::vector<textforge::QAFormat> formats{textforge::QAFormat::mcq, textforge::QAFormat::open,
                                             textforge::QAFormat::tf};
    VisualQAOptions qa;
};

struct CityCell {
    std::string city;
    std::string country;
    GridCell cell;
};

struct VisualDataset {
    std::vector<CityCell> cells;
    std::vector<ChartArtifact> charts;
    std::vector<textforge::QAItem> items;
    std::vector<std::pair<std::string, std::string>> images;
    std::map<std::string, std::size_t> counters;
    std::vector<std::string> drop_reasons;
};

/// Cities -> nearest cell -> canonical series -> windows -> charts -> QA.
/// Backend-driven categories that fail are counted as drops; a null
/// backend skips them.
VisualDataset run_visual_pipeline(const GriddedProduct& product, const CityInventory& inventory,
                                  const VisualPipelineConfig& config, llm::Backend* backend);

/// Each item passes structural validation and its evidence names a chart
/// whose provenance has a url or title.
std::vector<std::string> validate_visual_dataset(const VisualDataset& dataset,
                                                 const textforge::QAOptions& options = {});

/// charts/<id>.svg, charts/<id>.csv, charts/metadata.csv, images/*.svg,
/// items.jsonl and counters.json under `dir`. Throws SinkFailure.
void write_visual_dataset(const VisualDataset& dataset, const std::filesystem::path& dir);

}  // namespace climagent::geoforge
