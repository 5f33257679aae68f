#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <tuple>

namespace climagent::tools {

/// (country, industry, year) -> tCO2e per unit of revenue. Keys compare
/// case-insensitively; spaces and hyphens in industry names read as '_'.
class EmissionFactorTable {
public:
    /// CSV with header `country,industry,year,<factor column>`; factors > 0.
    static EmissionFactorTable parse(std::istream& in);
    static EmissionFactorTable load_file(const std::filesystem::path& path);

    void add(std::string_view country, std::string_view industry, int year, double factor);
    /// Throws UnknownFactorKey.
    double factor(std::string_view country, std::string_view industry, int year) const;
    std::size_t size() const noexcept { return entries_.size(); }

private:
    std::map<std::tuple<std::string, std::string, int>, double> entries_;
};

struct CarbonEstimate {
    double emissions_tco2e = 0.0;
    double factor = 0.0;
};

/// revenue * factor; revenue must be non-negative.
CarbonEstimate carbon_footprint(const EmissionFactorTable& table, std::string_view country, std::string_view industry,
                                int year, double revenue);

}  // namespace climagent::tools
