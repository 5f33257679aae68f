#include "climagent/tools/carbon.hpp"

#include <cctype>
#include <fstream>

#include "climagent/core/csv.hpp"
#include "climagent/core/error.hpp"

namespace climagent::tools {

namespace {

std::string key_text(std::string_view s) {
    std::string out;
    for (char c : s) {
        auto u = static_cast<unsigned char>(c);
        if (c == ' ' || c == '-') out.push_back('_');
        else out.push_back(static_cast<char>(std::tolower(u)));
    }
    while (!out.empty() && out.back() == '_') out.pop_back();
    while (!out.empty() && out.front() == '_') out.erase(out.begin());
    return out;
}

}  // namespace

void EmissionFactorTable::add(std::string_view country, std::string_view industry, int year, double factor) {
    if (!(factor > 0.0)) throw Error(ErrorCode::ConfigError, "emission factors must be strictly positive");
    entries_[{key_text(country), key_text(industry), year}] = factor;
}

EmissionFactorTable EmissionFactorTable::parse(std::istream& in) {
    EmissionFactorTable t;
    std::string line;
    if (!std::getline(in, line) || line.rfind("country,industry,year,", 0) != 0)
        throw Error(ErrorCode::ConfigError, "emission factor table needs header country,industry,year,<factor>");
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto f = core::split_csv_line(line);
        if (f.size() != 4) throw Error(ErrorCode::ConfigError, "bad emission factor row: " + line);
        t.add(f[0], f[1], std::stoi(f[2]), core::parse_double(f[3]));
    }
    return t;
}

EmissionFactorTable EmissionFactorTable::load_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ConfigError, "cannot open emission factor table " + path.string());
    return parse(in);
}

double EmissionFactorTable::factor(std::string_view country, std::string_view industry, int year) const {
    auto it = entries_.find({key_text(country), key_text(industry), year});
    if (it == entries_.end())
        throw Error(ErrorCode::UnknownFactorKey, "no emission factor for " + std::string(country) + "/" +
                                                     std::string(industry) + "/" + std::to_string(year));
    return it->second;
}

CarbonEstimate carbon_footprint(const EmissionFactorTable& table, std::string_view country, std::string_view industry,
                                int year, double revenue) {
    if (!(revenue >= 0.0)) throw Error(ErrorCode::InvalidArgument, "revenue must be non-negative");
    CarbonEstimate e;
    e.factor = table.factor(country, industry, year);
    e.emissions_tco2e = revenue * e.factor;
    return e;
}

}  // namespace climagent::tools
