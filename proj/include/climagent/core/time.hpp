#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace climagent::core {

using Instant = std::chrono::sys_seconds;
using Date = std::chrono::sys_days;

/// Parses ISO-8601 (with or without offset), epoch seconds, or a bare
/// YYYY-MM-DD date into a UTC instant. Inputs without an explicit offset are
/// read in `assumed_zone`; date-only inputs always map to 00:00:00 UTC.
Instant normalize_timestamp(std::string_view raw, std::string_view assumed_zone = "UTC");

/// Fixed UTC offset for a zone id: "UTC", "Z", "+04:00", "-0330", or one of
/// the Gulf IANA zones (none of which observe DST).
std::chrono::seconds zone_offset(std::string_view zone);

std::string format_iso(Instant t);  // 2023-04-15T08:00:00Z

Date parse_date(std::string_view text);  // strict YYYY-MM-DD
std::string format_date(Date d);

/// Calendar-year shift, clamping Feb 29 to Feb 28 when needed.
Instant add_years(Instant t, int years);

}  // namespace climagent::core
