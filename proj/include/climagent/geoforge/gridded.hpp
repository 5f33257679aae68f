#pragma once

#include <chrono>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "climagent/core/types.hpp"
#include "climagent/core/units.hpp"
#include "climagent/geoforge/grid.hpp"

namespace climagent::geoforge {

/// In-memory gridded product read from the plain-text fixture format:
///
///   gridded-fixture v1
///   source <id>
///   lats <v0> <v1> ...
///   lons <v0> <v1> ...
///   resolution <deg>
///   start <ISO-8601 instant>
///   cadence_seconds <n>
///   steps <n>
///   mask <0|1 per cell, row-major>        (optional)
///   variable <name> <unit>
///   <one line per step: nlat*nlon values, row-major, NA = missing>
///   variable ...
class GriddedProduct {
public:
    struct Variable {
        std::string unit;
        std::vector<std::optional<double>> values;  // step-major, then row-major cells
    };

    static GriddedProduct parse(std::istream& in);
    static GriddedProduct load_file(const std::filesystem::path& path);

    const std::string& source() const noexcept { return source_; }
    const core::GridSpec& grid() const noexcept { return grid_; }
    core::Instant start() const noexcept { return start_; }
    std::chrono::seconds cadence() const noexcept { return cadence_; }
    std::size_t steps() const noexcept { return steps_; }
    const std::optional<std::vector<bool>>& mask() const noexcept { return mask_; }
    const std::map<std::string, Variable>& variables() const noexcept { return variables_; }
    bool has_variable(const std::string& name) const { return variables_.count(name) > 0; }

    std::optional<double> raw_value(const std::string& variable, std::size_t step, GridCell cell) const;

    /// Nearest cell honouring the mask when the product carries one.
    GridCell locate(const core::GeoPoint& p, DistanceMetric metric = DistanceMetric::spherical) const;

private:
    GriddedProduct(std::string source, core::GridSpec grid) : source_(std::move(source)), grid_(std::move(grid)) {}

    std::string source_;
    core::GridSpec grid_;
    core::Instant start_{};
    std::chrono::seconds cadence_{86400};
    std::size_t steps_ = 0;
    std::optional<std::vector<bool>> mask_;
    std::map<std::string, Variable> variables_;
};

/// Time series of one variable at one cell, converted to canonical units.
/// Missing steps stay in the series as explicit-missing records. Throws
/// VariableAbsent when the product lacks the variable.
core::CanonicalSeries extract_series(const GriddedProduct& product, GridCell cell, const std::string& variable,
                                     const std::optional<std::string>& city = std::nullopt,
                                     const core::UnitTable& units = core::UnitTable::builtin());

}  // namespace climagent::geoforge
