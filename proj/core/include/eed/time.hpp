#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace eed {

inline constexpr std::int64_t kSecondsPerDay = 86400;

/// UTC instant with second precision.
struct Instant {
  std::int64_t sec = 0;  // seconds since the Unix epoch

  friend constexpr auto operator<=>(const Instant&, const Instant&) = default;
};

constexpr Instant add_seconds(Instant t, std::int64_t s) { return {t.sec + s}; }
constexpr Instant add_days(Instant t, std::int64_t d) { return {t.sec + d * kSecondsPerDay}; }

/// Proleptic Gregorian calendar date.
struct CivilDate {
  int year = 1970;
  int month = 1;  // 1..12
  int day = 1;    // 1..31

  friend constexpr auto operator<=>(const CivilDate&, const CivilDate&) = default;
};

/// Days since the epoch; floor semantics, so pre-epoch instants land on the
/// calendar day that contains them.
std::int64_t day_index(Instant t);
Instant start_of_day(Instant t);
Instant instant_from_day(std::int64_t day);

CivilDate civil_from_day(std::int64_t day);
std::int64_t day_from_civil(CivilDate d);
int days_in_month(int year, int month);

/// Calendar month subtraction with end-of-month clamping (Mar 31 - 1mo = Feb 28/29).
/// Time of day is preserved.
Instant sub_months(Instant t, int months);

/// Parses RFC 3339 ("2013-01-01T00:00:00Z", optional fraction and numeric
/// offsets) or a bare date ("2013-01-01", midnight UTC). Fractional seconds
/// are truncated. Throws Error on malformed input.
Instant parse_instant(std::string_view s);
CivilDate parse_date(std::string_view s);

std::string format_rfc3339(Instant t);
std::string format_date(Instant t);
std::string format_date(CivilDate d);

}  // namespace eed
