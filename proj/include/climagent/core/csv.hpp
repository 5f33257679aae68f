#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace climagent::core {

class CanonicalSeries;

inline constexpr std::string_view kCanonicalCsvHeader = "timestamp,variable,value,unit,lat,lon,city,source";

/// Splits one CSV line. Fields may be double-quoted with "" escapes.
std::vector<std::string> split_csv_line(std::string_view line);

/// Quotes a field only when it contains a comma, quote or newline.
std::string escape_csv_field(std::string_view field);

/// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);
double parse_double(std::string_view text);

/// Writes the universal CSV form of a series (header + one row per record,
/// LF endings, missing values as an empty field). Returns the row count.
std::size_t write_canonical_csv(const CanonicalSeries& series, std::ostream& sink);
CanonicalSeries read_canonical_csv(std::istream& source);

}  // namespace climagent::core
