#include "climagent/core/time.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <optional>

#include "climagent/core/error.hpp"

namespace climagent::core {

namespace {

using namespace std::chrono;

[[noreturn]] void fail(std::string_view raw, std::string_view why) {
    throw Error(ErrorCode::UnparseableTimestamp,
                "cannot parse timestamp '" + std::string(raw) + "': " + std::string(why));
}

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

std::optional<int> read_int(std::string_view s) {
    if (!all_digits(s)) return std::nullopt;
    int v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
    return v;
}

std::optional<Date> read_date(std::string_view s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
    auto y = read_int(s.substr(0, 4));
    auto m = read_int(s.substr(5, 2));
    auto d = read_int(s.substr(8, 2));
    if (!y || !m || !d) return std::nullopt;
    year_month_day ymd{year{*y}, month{static_cast<unsigned>(*m)}, day{static_cast<unsigned>(*d)}};
    if (!ymd.ok()) return std::nullopt;
    return sys_days{ymd};
}

// "+04:00", "-0330", "+04"
std::optional<seconds> read_offset(std::string_view s) {
    if (s.empty() || (s[0] != '+' && s[0] != '-')) return std::nullopt;
    int sign = s[0] == '-' ? -1 : 1;
    std::string_view rest = s.substr(1);
    std::optional<int> hh, mm = 0;
    if (rest.size() == 5 && rest[2] == ':') {
        hh = read_int(rest.substr(0, 2));
        mm = read_int(rest.substr(3, 2));
    } else if (rest.size() == 4) {
        hh = read_int(rest.substr(0, 2));
        mm = read_int(rest.substr(2, 2));
    } else if (rest.size() == 2) {
        hh = read_int(rest);
    } else {
        return std::nullopt;
    }
    if (!hh || !mm || *hh > 14 || *mm > 59) return std::nullopt;
    return seconds{sign * (*hh * 3600 + *mm * 60)};
}

struct ZoneEntry {
    std::string_view id;
    int offset_seconds;
};

constexpr std::array<ZoneEntry, 9> kZones{{
    {"UTC", 0},
    {"Z", 0},
    {"Etc/UTC", 0},
    {"Asia/Dubai", 4 * 3600},
    {"Asia/Muscat", 4 * 3600},
    {"Asia/Qatar", 3 * 3600},
    {"Asia/Riyadh", 3 * 3600},
    {"Asia/Kuwait", 3 * 3600},
    {"Asia/Bahrain", 3 * 3600},
}};

}  // namespace

seconds zone_offset(std::string_view zone) {
    for (const auto& z : kZones)
        if (z.id == zone) return seconds{z.offset_seconds};
    if (auto off = read_offset(zone)) return *off;
    throw Error(ErrorCode::InvalidArgument, "unknown time zone '" + std::string(zone) + "'");
}

Instant normalize_timestamp(std::string_view raw, std::string_view assumed_zone) {
    std::string_view s = raw;
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    if (s.empty()) fail(raw, "empty");

    // epoch seconds
    {
        std::string_view digits = s[0] == '-' ? s.substr(1) : s;
        if (all_digits(digits)) {
            long long v = 0;
            auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            if (ec != std::errc{} || p != s.data() + s.size()) fail(raw, "epoch out of range");
            return Instant{seconds{v}};
        }
    }

    if (s.size() == 10) {
        if (auto d = read_date(s)) return Instant{*d};
        fail(raw, "invalid date");
    }

    if (s.size() < 16 || (s[10] != 'T' && s[10] != 't' && s[10] != ' ')) fail(raw, "unrecognized encoding");
    auto date = read_date(s.substr(0, 10));
    if (!date) fail(raw, "invalid date");
    std::string_view t = s.substr(11);
    if (t.size() < 5 || t[2] != ':') fail(raw, "invalid time");
    auto hh = read_int(t.substr(0, 2));
    auto mi = read_int(t.substr(3, 2));
    int ss = 0;
    t.remove_prefix(5);
    if (!t.empty() && t[0] == ':') {
        auto sv = t.size() >= 3 ? read_int(t.substr(1, 2)) : std::nullopt;
        if (!sv) fail(raw, "invalid seconds");
        ss = *sv;
        t.remove_prefix(3);
        if (!t.empty() && (t[0] == '.' || t[0] == ',')) {
            std::size_t i = 1;
            while (i < t.size() && std::isdigit(static_cast<unsigned char>(t[i]))) ++i;
            if (i == 1) fail(raw, "invalid fraction");
            t.remove_prefix(i);  // sub-second precision is truncated
        }
    }
    if (!hh || !mi || *hh > 23 || *mi > 59 || ss > 59) fail(raw, "time out of range");

    seconds offset{};
    if (t.empty()) {
        try {
            offset = zone_offset(assumed_zone);
        } catch (const Error&) {
            fail(raw, "unknown assumed zone '" + std::string(assumed_zone) + "'");
        }
    } else if (t == "Z" || t == "z") {
        offset = seconds{0};
    } else if (auto off = read_offset(t)) {
        offset = *off;
    } else {
        fail(raw, "invalid offset");
    }

    Instant local = Instant{*date} + hours{*hh} + minutes{*mi} + seconds{ss};
    return local - offset;
}

std::string format_iso(Instant t) {
    auto days = floor<std::chrono::days>(t);
    year_month_day ymd{days};
    hh_mm_ss hms{t - days};
    char buf[64];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02ldZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<long>(hms.hours().count()), static_cast<long>(hms.minutes().count()),
                  static_cast<long>(hms.seconds().count()));
    return buf;
}

Date parse_date(std::string_view text) {
    if (auto d = read_date(text)) return *d;
    throw Error(ErrorCode::InvalidArgument, "invalid date '" + std::string(text) + "' (expected YYYY-MM-DD)");
}

std::string format_date(Date d) {
    year_month_day ymd{d};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

Instant add_years(Instant t, int years) {
    auto days = floor<std::chrono::days>(t);
    auto tod = t - days;
    year_month_day ymd{days};
    year_month_day shifted = ymd + std::chrono::years{years};
    if (!shifted.ok()) shifted = shifted.year() / shifted.month() / last;
    return Instant{sys_days{shifted}} + tod;
}

}  // namespace climagent::core
