#include "climagent/geoforge/gridded.hpp"

#include <fstream>
#include <sstream>

#include "climagent/core/csv.hpp"
#include "climagent/core/error.hpp"

namespace climagent::geoforge {

namespace {

[[noreturn]] void bad(std::size_t lineno, const std::string& what) {
    throw Error(ErrorCode::ParseError, "gridded fixture line " + std::to_string(lineno) + ": " + what);
}

std::vector<std::string> words(const std::string& line) {
    std::istringstream in(line);
    std::vector<std::string> out;
    std::string w;
    while (in >> w) out.push_back(w);
    return out;
}

std::vector<double> numbers(const std::vector<std::string>& w, std::size_t from, std::size_t lineno) {
    std::vector<double> out;
    for (std::size_t k = from; k < w.size(); ++k) {
        try {
            out.push_back(core::parse_double(w[k]));
        } catch (const Error&) {
            bad(lineno, "not a number: " + w[k]);
        }
    }
    return out;
}

}  // namespace

GriddedProduct GriddedProduct::parse(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    auto next = [&]() -> std::vector<std::string> {
        while (std::getline(in, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty() || line[0] == '#') continue;
            return words(line);
        }
        return {};
    };

    auto w = next();
    if (w.size() != 2 || w[0] != "gridded-fixture" || w[1] != "v1") bad(lineno, "expected 'gridded-fixture v1'");

    std::map<std::string, std::vector<std::string>> header;
    std::vector<std::string> pending;
    while (!(w = next()).empty()) {
        if (w[0] == "variable") {
            pending = w;
            break;
        }
        header[w[0]] = w;
    }
    for (const char* key : {"source", "lats", "lons", "resolution", "start", "cadence_seconds", "steps"})
        if (!header.count(key)) bad(lineno, std::string("missing header '") + key + "'");

    auto lats = numbers(header["lats"], 1, lineno);
    auto lons = numbers(header["lons"], 1, lineno);
    auto res = numbers(header["resolution"], 1, lineno);
    if (res.size() != 1) bad(lineno, "resolution takes one value");
    GriddedProduct p(header["source"].size() > 1 ? header["source"][1] : "", core::GridSpec(lats, lons, res[0]));
    p.start_ = core::normalize_timestamp(header["start"].at(1));
    auto cadence = numbers(header["cadence_seconds"], 1, lineno);
    auto steps = numbers(header["steps"], 1, lineno);
    if (cadence.size() != 1 || cadence[0] <= 0) bad(lineno, "cadence_seconds must be positive");
    if (steps.size() != 1 || steps[0] < 0) bad(lineno, "steps must be non-negative");
    p.cadence_ = std::chrono::seconds(static_cast<long long>(cadence[0]));
    p.steps_ = static_cast<std::size_t>(steps[0]);
    const std::size_t cells = p.grid_.size();
    if (header.count("mask")) {
        auto m = numbers(header["mask"], 1, lineno);
        if (m.size() != cells) bad(lineno, "mask needs one entry per cell");
        std::vector<bool> mask;
        for (double v : m) mask.push_back(v != 0.0);
        p.mask_ = std::move(mask);
    }

    while (!pending.empty()) {
        if (pending.size() != 3) bad(lineno, "expected 'variable <name> <unit>'");
        Variable var;
        var.unit = pending[2];
        var.values.reserve(p.steps_ * cells);
        for (std::size_t s = 0; s < p.steps_; ++s) {
            auto row = next();
            if (row.size() != cells) bad(lineno, "expected " + std::to_string(cells) + " values");
            for (const auto& v : row) {
                if (v == "NA") {
                    var.values.push_back(std::nullopt);
                } else {
                    try {
                        var.values.push_back(core::parse_double(v));
                    } catch (const Error&) {
                        bad(lineno, "not a number: " + v);
                    }
                }
            }
        }
        if (!p.variables_.emplace(pending[1], std::move(var)).second) bad(lineno, "duplicate variable " + pending[1]);
        pending = next();
        if (!pending.empty() && pending[0] != "variable") bad(lineno, "expected a variable block");
    }
    return p;
}

GriddedProduct GriddedProduct::load_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ConfigError, "cannot open gridded fixture " + path.string());
    return parse(in);
}

std::optional<double> GriddedProduct::raw_value(const std::string& variable, std::size_t step, GridCell cell) const {
    auto it = variables_.find(variable);
    if (it == variables_.end()) throw Error(ErrorCode::VariableAbsent, "product lacks variable " + variable);
    if (step >= steps_ || cell.i >= grid_.lats().size() || cell.j >= grid_.lons().size())
        throw Error(ErrorCode::InvalidArgument, "cell or step outside product");
    return it->second.values[step * grid_.size() + cell.i * grid_.lons().size() + cell.j];
}

GridCell GriddedProduct::locate(const core::GeoPoint& p, DistanceMetric metric) const {
    return mask_ ? nearest_masked_cell(p, grid_, *mask_, metric) : nearest_grid_cell(p, grid_, metric);
}

core::CanonicalSeries extract_series(const GriddedProduct& product, GridCell cell, const std::string& variable,
                                     const std::optional<std::string>& city, const core::UnitTable& units) {
    auto it = product.variables().find(variable);
    if (it == product.variables().end())
        throw Error(ErrorCode::VariableAbsent, "product " + product.source() + " lacks variable " + variable);
    if (cell.i >= product.grid().lats().size() || cell.j >= product.grid().lons().size())
        throw Error(ErrorCode::InvalidArgument, "cell outside product grid");
    const auto& canonical = units.canonical_unit(variable);
    const auto node = product.grid().node(cell.i, cell.j);
    std::vector<core::CanonicalRecord> records;
    records.reserve(product.steps());
    for (std::size_t s = 0; s < product.steps(); ++s) {
        core::CanonicalRecord r;
        r.timestamp = product.start() + product.cadence() * static_cast<long long>(s);
        r.variable = variable;
        r.unit = canonical;
        r.location = node;
        r.city = city;
        r.source = product.source();
        if (auto raw = product.raw_value(variable, s, cell))
            r.value = units.to_canonical(*raw, it->second.unit, variable).first;
        records.push_back(std::move(r));
    }
    return core::CanonicalSeries(std::move(records), units);
}

}  // namespace climagent::geoforge
