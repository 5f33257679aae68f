#include "climagent/geoforge/chart.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "climagent/core/csv.hpp"
#include "climagent/core/error.hpp"

namespace climagent::geoforge {

namespace {

constexpr double kLeft = 80.0;
constexpr double kRight = 770.0;
constexpr double kTop = 50.0;
constexpr double kBottom = 340.0;

std::string xml_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

double days_between(core::Instant a, core::Instant b) {
    return static_cast<double>((b - a).count()) / 86400.0;
}

}  // namespace

std::string slugify(std::string_view text) {
    std::string out;
    for (char c : text) {
        auto u = static_cast<unsigned char>(c);
        if (std::isalnum(u)) {
            out.push_back(static_cast<char>(std::tolower(u)));
        } else if (!out.empty() && out.back() != '-') {
            out.push_back('-');
        }
    }
    while (!out.empty() && out.back() == '-') out.pop_back();
    return out;
}

nlohmann::json ChartMetadata::to_json() const {
    return {{"city", city},
            {"variable", variable},
            {"unit", unit},
            {"start", start},
            {"end", end},
            {"stats", {{"n", stats.n}, {"min", stats.min}, {"max", stats.max}, {"mean", stats.mean}, {"std", stats.std}}},
            {"slope_per_day", slope_per_day}};
}

ChartMetadata describe_series(const core::CanonicalSeries& slice, std::string city, core::Instant start,
                              core::Instant end) {
    ChartMetadata m;
    m.city = std::move(city);
    m.variable = slice.empty() ? "" : slice.variable();
    m.unit = slice.empty() ? "" : slice.unit();
    m.start = core::format_iso(start);
    m.end = core::format_iso(end);
    std::vector<double> xs, ys;
    for (const auto& r : slice.records()) {
        if (!r.value) continue;
        xs.push_back(days_between(start, r.timestamp));
        ys.push_back(*r.value);
    }
    m.stats = core::summarize(ys);
    m.slope_per_day = core::least_squares_slope(xs, ys);
    return m;
}

std::string render_line_chart(const core::CanonicalSeries& slice, core::Instant start, core::Instant end,
                              std::string_view title, std::string_view y_label) {
    auto vals = slice.values();
    double lo = vals.empty() ? 0.0 : *std::min_element(vals.begin(), vals.end());
    double hi = vals.empty() ? 1.0 : *std::max_element(vals.begin(), vals.end());
    if (hi - lo < 1e-12) {
        double pad = std::max(1.0, std::fabs(lo) * 0.1);
        lo -= pad;
        hi += pad;
    }
    const double span_days = std::max(days_between(start, end), 1e-9);
    auto px = [&](core::Instant t) { return kLeft + (kRight - kLeft) * days_between(start, t) / span_days; };
    auto py = [&](double v) { return kBottom - (kBottom - kTop) * (v - lo) / (hi - lo); };

    std::string svg;
    svg += fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\" "
        "font-family=\"DejaVu Sans, sans-serif\" font-size=\"12\">\n",
        kChartWidth, kChartHeight);
    svg += fmt::format("<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"#ffffff\"/>\n", kChartWidth,
                       kChartHeight);
    svg += fmt::format("<text x=\"{:.2f}\" y=\"28\" text-anchor=\"middle\" font-size=\"15\">{}</text>\n",
                       (kLeft + kRight) / 2.0, xml_escape(title));

    for (int k = 0; k <= 4; ++k) {
        double v = lo + (hi - lo) * k / 4.0;
        double y = py(v);
        svg += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"#dddddd\"/>\n", kLeft,
                           y, kRight, y);
        svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\">{:.2f}</text>\n", kLeft - 6.0, y + 4.0,
                           v);
    }
    for (int k = 0; k <= 3; ++k) {
        auto t = start + std::chrono::seconds((end - start).count() * k / 3);
        double x = px(t);
        svg += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\" stroke=\"#333333\"/>\n", x,
                           kBottom, kBottom + 5.0);
        svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{}</text>\n", x, kBottom + 20.0,
                           core::format_date(std::chrono::floor<std::chrono::days>(t)));
    }
    svg += fmt::format(
        "<path d=\"M{0:.2f} {1:.2f} L{0:.2f} {2:.2f} L{3:.2f} {2:.2f}\" fill=\"none\" stroke=\"#333333\"/>\n", kLeft,
        kTop, kBottom, kRight);
    svg += fmt::format("<text x=\"{:.2f}\" y=\"{}\" text-anchor=\"middle\">time (UTC)</text>\n",
                       (kLeft + kRight) / 2.0, kChartHeight - 16);
    svg += fmt::format(
        "<text x=\"18\" y=\"{0:.2f}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {0:.2f})\">{1}</text>\n",
        (kTop + kBottom) / 2.0, xml_escape(y_label));

    std::string points;
    auto flush = [&] {
        if (points.empty()) return;
        svg += "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"" + points + "\"/>\n";
        points.clear();
    };
    for (const auto& r : slice.records()) {
        if (!r.value) {
            flush();
            continue;
        }
        if (!points.empty()) points.push_back(' ');
        points += fmt::format("{:.2f},{:.2f}", px(r.timestamp), py(*r.value));
    }
    flush();
    svg += "</svg>\n";
    return svg;
}

std::string ChartArtifact::data_csv() const {
    std::ostringstream out;
    core::write_canonical_csv(data, out);
    return out.str();
}

ChartArtifact build_chart(const core::CanonicalSeries& series, const WindowSpec& window, const std::string& city,
                          const std::string& variable) {
    auto slice = series.slice(window.start, window.end);
    if (slice.values().empty())
        throw Error(ErrorCode::EmptySlice, "no observed values for " + city + "/" + variable + " in window");
    if (slice.variable() != variable)
        throw Error(ErrorCode::InvalidArgument, "series variable " + slice.variable() + " is not " + variable);

    ChartArtifact a;
    a.window = window;
    a.metadata = describe_series(slice, city, window.start, window.end);
    a.id = fmt::format("{}_{}_{}", slugify(city), slugify(variable), core::format_date(std::chrono::floor<std::chrono::days>(window.start)));
    auto title = fmt::format("{} | {} | {} to {}", city, variable,
                             core::format_date(std::chrono::floor<std::chrono::days>(window.start)),
                             core::format_date(std::chrono::floor<std::chrono::days>(window.end - std::chrono::seconds(1))));
    a.svg = render_line_chart(slice, window.start, window.end, title, fmt::format("{} ({})", variable, slice.unit()));
    a.provenance.title = fmt::format("{} {} series for {}", slice[0].source, variable, city);
    a.provenance.organization = slice[0].source;
    a.provenance.query = fmt::format("{}:{}:{}", city, variable, a.metadata.start);
    a.provenance.retrieved_at = window.start;
    a.data = std::move(slice);
    return a;
}

std::string chart_metadata_row(const ChartArtifact& a) {
    const auto& m = a.metadata;
    std::vector<std::string> f{a.id,
                               m.city,
                               m.variable,
                               m.unit,
                               m.start,
                               m.end,
                               std::to_string(m.stats.n),
                               core::format_double(m.stats.min),
                               core::format_double(m.stats.max),
                               core::format_double(m.stats.mean),
                               core::format_double(m.stats.std),
                               core::format_double(m.slope_per_day),
                               core::format_double(a.window.completeness),
                               a.csv_filename(),
                               a.svg_filename()};
    std::string row;
    for (std::size_t k = 0; k < f.size(); ++k) {
        if (k) row.push_back(',');
        row += core::escape_csv_field(f[k]);
    }
    return row;
}

void write_chart_files(const ChartArtifact& artifact, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    for (auto [name, body] : {std::pair{artifact.svg_filename(), artifact.svg},
                              std::pair{artifact.csv_filename(), artifact.data_csv()}}) {
        std::ofstream out(dir / name, std::ios::binary);
        out << body;
        if (!out) throw Error(ErrorCode::SinkFailure, "cannot write " + (dir / name).string());
    }
}

}  // namespace climagent::geoforge
