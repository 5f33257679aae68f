#include "climagent/core/csv.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>

#include "climagent/core/error.hpp"
#include "climagent/core/types.hpp"

namespace climagent::core {

std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"' && cur.empty()) {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (quoted) throw Error(ErrorCode::ParseError, "unterminated quoted CSV field");
    fields.push_back(std::move(cur));
    return fields;
}

std::string escape_csv_field(std::string_view field) {
    if (field.find_first_of(",\"\n") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::string format_double(double v) {
    char buf[64];
    // plain notation in the everyday range; readers and claim scanners don't handle exponents
    const double a = std::fabs(v);
    const bool plain = a == 0.0 || (a >= 1e-4 && a < 1e15);
    auto [p, ec] = plain ? std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed)
                         : std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{}) throw Error(ErrorCode::InvalidArgument, "cannot format number");
    return std::string(buf, p);
}

double parse_double(std::string_view text) {
    double v = 0.0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || p != text.data() + text.size() || text.empty())
        throw Error(ErrorCode::ParseError, "not a number: '" + std::string(text) + "'");
    return v;
}

std::size_t write_canonical_csv(const CanonicalSeries& series, std::ostream& sink) {
    sink << kCanonicalCsvHeader << '\n';
    std::size_t rows = 0;
    for (const auto& r : series.records()) {
        sink << format_iso(r.timestamp) << ',' << escape_csv_field(r.variable) << ','
             << (r.value ? format_double(*r.value) : std::string()) << ',' << escape_csv_field(r.unit) << ','
             << format_double(r.location.lat()) << ',' << format_double(r.location.lon()) << ','
             << escape_csv_field(r.city.value_or("")) << ',' << escape_csv_field(r.source) << '\n';
        ++rows;
    }
    if (!sink) throw Error(ErrorCode::SinkFailure, "failed writing canonical CSV");
    return rows;
}

CanonicalSeries read_canonical_csv(std::istream& source) {
    std::string line;
    if (!std::getline(source, line) || line != kCanonicalCsvHeader)
        throw Error(ErrorCode::ParseError, "canonical CSV header mismatch");
    std::vector<CanonicalRecord> records;
    while (std::getline(source, line)) {
        if (line.empty()) continue;
        auto f = split_csv_line(line);
        if (f.size() != 8) throw Error(ErrorCode::ParseError, "canonical CSV row needs 8 fields: " + line);
        CanonicalRecord r{
            .timestamp = normalize_timestamp(f[0]),
            .variable = f[1],
            .value = f[2].empty() ? std::nullopt : std::optional<double>(parse_double(f[2])),
            .unit = f[3],
            .location = GeoPoint(parse_double(f[4]), parse_double(f[5])),
            .city = f[6].empty() ? std::nullopt : std::optional<std::string>(f[6]),
            .source = f[7],
        };
        records.push_back(std::move(r));
    }
    return CanonicalSeries(std::move(records));
}

}  // namespace climagent::core
