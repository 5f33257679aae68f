#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace climagent::core {

/// Affine map from a source unit into a variable's canonical unit:
/// canonical = value * factor + offset.
struct UnitConversion {
    std::string unit;
    double factor = 1.0;
    double offset = 0.0;
};

/// Per-variable conversion table. Loaded from a plain-text file with one
/// `variable,unit,factor,offset` row per line; the first row of each
/// variable is its canonical unit.
class UnitTable {
public:
    static UnitTable parse(std::istream& in);
    static UnitTable load_file(const std::filesystem::path& path);
    /// The table shipped in config/units.txt, compiled in.
    static const UnitTable& builtin();

    bool has_variable(std::string_view variable) const;
    const std::string& canonical_unit(std::string_view variable) const;
    bool is_canonical(std::string_view variable, std::string_view unit) const;

    std::pair<double, std::string> to_canonical(double value, std::string_view from_unit,
                                                std::string_view variable) const;
    double from_canonical(double value, std::string_view to_unit, std::string_view variable) const;

    std::vector<std::string> variables() const;
    const std::vector<UnitConversion>& conversions(std::string_view variable) const;
    const std::string& version() const { return version_; }

private:
    const UnitConversion& find(std::string_view variable, std::string_view unit) const;

    std::string version_;
    std::map<std::string, std::vector<UnitConversion>, std::less<>> table_;
};

std::pair<double, std::string> normalize_unit(double value, std::string_view from_unit,
                                              std::string_view variable,
                                              const UnitTable& table = UnitTable::builtin());

}  // namespace climagent::core
