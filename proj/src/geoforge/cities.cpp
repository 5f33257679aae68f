#include "climagent/geoforge/cities.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>

#include "climagent/core/csv.hpp"
#include "climagent/core/error.hpp"

namespace climagent::geoforge {

bool BoundingBox::contains(const core::GeoPoint& p) const {
    return p.lat() >= lat_min && p.lat() <= lat_max && p.lon() >= lon_min && p.lon() <= lon_max;
}

std::string normalize_place_name(std::string_view name) {
    std::string out;
    bool pending_space = false;
    for (char raw : name) {
        auto c = static_cast<unsigned char>(raw);
        if (std::isspace(c) || c == '_') {
            pending_space = !out.empty();
            continue;
        }
        if (std::ispunct(c) && c != '-') continue;
        if (pending_space) out.push_back(' ');
        pending_space = false;
        out.push_back(static_cast<char>(std::tolower(c)));
    }
    return out;
}

namespace {

std::size_t levenshtein(std::string_view a, std::string_view b) {
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

}  // namespace

double name_similarity(std::string_view a, std::string_view b) {
    auto na = normalize_place_name(a);
    auto nb = normalize_place_name(b);
    if (na.empty() && nb.empty()) return 1.0;
    auto longest = std::max(na.size(), nb.size());
    return 1.0 - static_cast<double>(levenshtein(na, nb)) / static_cast<double>(longest);
}

CityInventory::CityInventory(std::vector<CityEntry> entries, BoundingBox box)
    : entries_(std::move(entries)), box_(box) {
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& e : entries_) {
        if (std::find(gulf_countries().begin(), gulf_countries().end(), e.country) == gulf_countries().end())
            throw Error(ErrorCode::ConfigError, "city " + e.name + " has non-Gulf country " + e.country);
        if (!box_.contains(e.location))
            throw Error(ErrorCode::ConfigError, "city " + e.name + " lies outside the bounding box");
        if (!seen.emplace(normalize_place_name(e.name), e.country).second)
            throw Error(ErrorCode::ConfigError, "duplicate city " + e.name + " in " + e.country);
    }
}

CityInventory CityInventory::parse(std::istream& in, BoundingBox box) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("city,country,lat,lon", 0) != 0)
        throw Error(ErrorCode::ConfigError, "city inventory must start with header city,country,lat,lon");
    std::vector<CityEntry> entries;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto f = core::split_csv_line(line);
        if (f.size() != 4) throw Error(ErrorCode::ConfigError, "city inventory line " + std::to_string(lineno));
        try {
            entries.push_back({f[0], f[1], core::GeoPoint(core::parse_double(f[2]), core::parse_double(f[3]))});
        } catch (const Error& e) {
            throw Error(ErrorCode::ConfigError, "city inventory line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return CityInventory(std::move(entries), box);
}

CityInventory CityInventory::load_file(const std::filesystem::path& path, BoundingBox box) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ConfigError, "cannot open city inventory " + path.string());
    return parse(in, box);
}

const CityEntry* CityInventory::find_exact(std::string_view name, std::string_view country) const {
    auto key = normalize_place_name(name);
    for (const auto& e : entries_) {
        if (normalize_place_name(e.name) != key) continue;
        if (!country.empty() && normalize_place_name(e.country) != normalize_place_name(country)) continue;
        return &e;
    }
    return nullptr;
}

CityMatch CityInventory::resolve(std::string_view query, double floor) const {
    std::string_view name = query;
    std::string country;
    if (auto comma = query.find(','); comma != std::string_view::npos) {
        name = query.substr(0, comma);
        country = normalize_place_name(query.substr(comma + 1));
    }
    if (normalize_place_name(name).empty()) throw Error(ErrorCode::InvalidArgument, "empty region name");
    if (const auto* hit = find_exact(name, country)) return {hit, 1.0};

    CityMatch best;
    for (const auto& e : entries_) {
        if (!country.empty() && normalize_place_name(e.country) != country) continue;
        double s = name_similarity(name, e.name);
        if (s > best.similarity) best = {&e, s};
    }
    if (!best.entry || best.similarity < floor)
        throw Error(ErrorCode::UnknownRegion, "no Gulf city matches '" + std::string(query) + "'");
    return best;
}

}  // namespace climagent::geoforge
