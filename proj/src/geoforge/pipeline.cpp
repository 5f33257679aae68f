#include "climagent/geoforge/pipeline.hpp"

#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "climagent/core/error.hpp"

namespace climagent::geoforge {

using nlohmann::json;

VisualDataset run_visual_pipeline(const GriddedProduct& product, const CityInventory& inventory,
                                  const VisualPipelineConfig& config, llm::Backend* backend) {
    if (config.cities.empty()) throw Error(ErrorCode::InvalidArgument, "no cities requested");
    VisualDataset ds;
    auto& n = ds.counters;
    for (const char* k : {"series", "windows_kept", "windows_low_coverage", "charts", "charts_dropped", "items", "items_dropped",
                          "categories_skipped"})
        n[k] = 0;

    std::vector<std::string> variables = config.variables;
    if (variables.empty())
        for (const auto& [name, v] : product.variables()) variables.push_back(name);

    for (const auto& query : config.cities) {
        auto match = inventory.resolve(query);
        CityCell cc{match.entry->name, match.entry->country, product.locate(match.entry->location, config.metric)};
        ds.cells.push_back(cc);
        for (const auto& var : variables) {
            auto series = extract_series(product, cc.cell, var, cc.city);
            ++n["series"];
            auto windows = segment_windows(series, config.delta_days, config.rho, config.years);
            n["windows_low_coverage"] +=
                segment_windows(series, config.delta_days, 1e-9, config.years).size() - windows.size();
            if (config.window_limit > 0 && windows.size() > config.window_limit)
                windows.erase(windows.begin(), windows.end() - static_cast<std::ptrdiff_t>(config.window_limit));
            n["windows_kept"] += windows.size();
            for (const auto& w : windows) {
                ChartArtifact chart;
                try {
                    chart = build_chart(series, w, cc.city, var);
                } catch (const Error& e) {
                    if (e.code() != ErrorCode::EmptySlice) throw;
                    ++n["charts_dropped"];
                    ds.drop_reasons.push_back(cc.city + "/" + var + " window " + std::to_string(w.index) + ": " + e.what());
                    continue;
                }
                chart.provenance.title = product.source() + " " + var + " series for " + cc.city;
                for (auto cat : config.categories) {
                    bool needs_backend = cat == VisualCategory::forecasting || cat == VisualCategory::reasoning;
                    if (needs_backend && !backend) {
                        ++n["categories_skipped"];
                        continue;
                    }
                    for (auto fmt : config.formats) {
                        try {
                            auto out = synthesize_visual_qa(chart, cat, fmt, backend, config.qa);
                            n["items_dropped"] += out.qa.dropped;
                            for (auto& r : out.qa.drop_reasons) ds.drop_reasons.push_back(std::move(r));
                            for (auto& it : out.qa.items) ds.items.push_back(std::move(it));
                            for (auto& img : out.images) ds.images.push_back(std::move(img));
                        } catch (const Error& e) {
                            if (e.code() != ErrorCode::BackendFailure) throw;
                            ++n["items_dropped"];
                            ds.drop_reasons.push_back(chart.id + " " + std::string(to_string(cat)) + ": " + e.what());
                        }
                    }
                }
                ds.charts.push_back(std::move(chart));
            }
        }
    }
    n["charts"] = ds.charts.size();
    n["items"] = ds.items.size();
    return ds;
}

std::vector<std::string> validate_visual_dataset(const VisualDataset& ds, const textforge::QAOptions& options) {
    std::vector<std::string> problems;
    std::map<std::string, const ChartArtifact*> charts;
    for (const auto& c : ds.charts) charts[c.id] = &c;
    for (const auto& item : ds.items) {
        std::string why;
        if (!textforge::validate_qa_item(item, options, &why)) problems.push_back(item.id + ": " + why);
        if (item.evidence.empty()) problems.push_back(item.id + ": no evidence");
        for (const auto& ref : item.evidence) {
            auto it = charts.find(ref);
            if (it == charts.end()) problems.push_back(item.id + ": unknown chart " + ref);
            else if (!it->second->provenance.url && !it->second->provenance.title)
                problems.push_back(ref + ": provenance has neither url nor title");
        }
    }
    return problems;
}

namespace {

void put(const std::filesystem::path& p, const std::string& body) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::SinkFailure, "cannot write " + p.string());
    out << body;
    if (!out) throw Error(ErrorCode::SinkFailure, "write failed for " + p.string());
}

}  // namespace

void write_visual_dataset(const VisualDataset& ds, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir / "charts", ec);
    std::filesystem::create_directories(dir / "images", ec);
    if (ec) throw Error(ErrorCode::SinkFailure, "cannot create " + dir.string());
    std::string meta(kChartMetadataHeader);
    meta += '\n';
    for (const auto& c : ds.charts) {
        write_chart_files(c, dir / "charts");
        meta += chart_metadata_row(c) + '\n';
    }
    put(dir / "charts" / "metadata.csv", meta);
    for (const auto& [name, svg] : ds.images) put(dir / "images" / name, svg);

    std::map<std::string, const ChartArtifact*> charts;
    for (const auto& c : ds.charts) charts[c.id] = &c;
    std::string lines;
    for (const auto& item : ds.items) {
        auto j = item.to_json();
        json chain = json::array();
        for (const auto& ref : item.evidence)
            if (auto it = charts.find(ref); it != charts.end())
                chain.push_back({{"chart", ref},
                                 {"data_ref", "charts/" + it->second->csv_filename()},
                                 {"provenance", textforge::to_json(it->second->provenance)}});
        j["evidence_chain"] = chain;
        lines += j.dump() + '\n';
    }
    put(dir / "items.jsonl", lines);

    json counters = json::object();
    for (const auto& [k, v] : ds.counters) counters[k] = v;
    json cells = json::array();
    for (const auto& c : ds.cells) cells.push_back({{"city", c.city}, {"country", c.country}, {"i", c.cell.i}, {"j", c.cell.j}});
    put(dir / "counters.json", json{{"counters", counters}, {"cells", cells}, {"drop_reasons", ds.drop_reasons}}.dump() + '\n');
}

}  // namespace climagent::geoforge
