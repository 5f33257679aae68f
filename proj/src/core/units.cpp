#include "climagent/core/units.hpp"

#include <fstream>
#include <sstream>

#include "climagent/core/csv.hpp"
#include "climagent/core/error.hpp"

namespace climagent::core {

namespace {

// Keep identical to config/units.txt; a unit test compares the two.
constexpr std::string_view kBuiltinTable =
#include "units_table.inc"
    ;

}  // namespace

UnitTable UnitTable::parse(std::istream& in) {
    UnitTable t;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (t.version_.empty() && line.rfind("# unit-table ", 0) == 0) t.version_ = line.substr(2);
            continue;
        }
        auto fields = split_csv_line(line);
        if (fields.size() != 4)
            throw Error(ErrorCode::ParseError, "unit table line " + std::to_string(lineno) + ": expected 4 fields");
        UnitConversion c{fields[1], parse_double(fields[2]), parse_double(fields[3])};
        auto& rows = t.table_[fields[0]];
        if (rows.empty() && (c.factor != 1.0 || c.offset != 0.0))
            throw Error(ErrorCode::ParseError, "unit table line " + std::to_string(lineno) +
                                                   ": canonical unit must have factor 1, offset 0");
        if (c.factor == 0.0)
            throw Error(ErrorCode::ParseError, "unit table line " + std::to_string(lineno) + ": zero factor");
        for (const auto& r : rows)
            if (r.unit == c.unit)
                throw Error(ErrorCode::ParseError, "unit table line " + std::to_string(lineno) + ": duplicate unit");
        rows.push_back(std::move(c));
    }
    if (t.version_.empty()) throw Error(ErrorCode::ParseError, "unit table missing '# unit-table vN' header");
    return t;
}

UnitTable UnitTable::load_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ConfigError, "cannot open unit table " + path.string());
    return parse(in);
}

const UnitTable& UnitTable::builtin() {
    static const UnitTable table = [] {
        std::istringstream in{std::string(kBuiltinTable)};
        return parse(in);
    }();
    return table;
}

bool UnitTable::has_variable(std::string_view variable) const {
    return table_.find(variable) != table_.end();
}

const std::vector<UnitConversion>& UnitTable::conversions(std::string_view variable) const {
    auto it = table_.find(variable);
    if (it == table_.end())
        throw Error(ErrorCode::UnknownVariable, "unknown variable '" + std::string(variable) + "'");
    return it->second;
}

const std::string& UnitTable::canonical_unit(std::string_view variable) const {
    return conversions(variable).front().unit;
}

bool UnitTable::is_canonical(std::string_view variable, std::string_view unit) const {
    auto it = table_.find(variable);
    return it != table_.end() && it->second.front().unit == unit;
}

const UnitConversion& UnitTable::find(std::string_view variable, std::string_view unit) const {
    for (const auto& c : conversions(variable))
        if (c.unit == unit) return c;
    throw Error(ErrorCode::UnknownUnit,
                "unit '" + std::string(unit) + "' not convertible for variable '" + std::string(variable) + "'");
}

std::pair<double, std::string> UnitTable::to_canonical(double value, std::string_view from_unit,
                                                       std::string_view variable) const {
    const auto& c = find(variable, from_unit);
    const auto& canonical = canonical_unit(variable);
    if (c.factor == 1.0 && c.offset == 0.0) return {value, canonical};
    return {value * c.factor + c.offset, canonical};
}

double UnitTable::from_canonical(double value, std::string_view to_unit, std::string_view variable) const {
    const auto& c = find(variable, to_unit);
    return (value - c.offset) / c.factor;
}

std::vector<std::string> UnitTable::variables() const {
    std::vector<std::string> out;
    for (const auto& [k, _] : table_) out.push_back(k);
    return out;
}

std::pair<double, std::string> normalize_unit(double value, std::string_view from_unit,
                                              std::string_view variable, const UnitTable& table) {
    return table.to_canonical(value, from_unit, variable);
}

}  // namespace climagent::core
