#include "eed/time.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cstdio>

#include "eed/error.hpp"

namespace eed {

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  return (a % b != 0 && (a < 0) != (b < 0)) ? q - 1 : q;
}

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int parse_int(std::string_view s, size_t pos, size_t len, const char* what) {
  if (pos + len > s.size()) fail(std::string("timestamp too short, expected ") + what);
  int value = 0;
  auto [ptr, ec] = std::from_chars(s.data() + pos, s.data() + pos + len, value);
  if (ec != std::errc() || ptr != s.data() + pos + len)
    fail(std::string("malformed ") + what + " in timestamp '" + std::string(s) + "'");
  return value;
}

}  // namespace

std::int64_t day_index(Instant t) { return floor_div(t.sec, kSecondsPerDay); }

Instant start_of_day(Instant t) { return {day_index(t) * kSecondsPerDay}; }

Instant instant_from_day(std::int64_t day) { return {day * kSecondsPerDay}; }

// Howard Hinnant's civil-days algorithms (public domain).
std::int64_t day_from_civil(CivilDate d) {
  int y = d.year;
  const int m = d.month;
  y -= m <= 2;
  const std::int64_t era = floor_div(y, 400);
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2) / 5 +
                       static_cast<unsigned>(d.day) - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

CivilDate civil_from_day(std::int64_t day) {
  day += 719468;
  const std::int64_t era = floor_div(day, 146097);
  const unsigned doe = static_cast<unsigned>(day - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp + (mp < 10 ? 3 : -9);
  return {static_cast<int>(y + (m <= 2)), static_cast<int>(m), static_cast<int>(d)};
}

int days_in_month(int year, int month) {
  static constexpr std::array<int, 12> lengths = {31, 28, 31, 30, 31, 30,
                                                  31, 31, 30, 31, 30, 31};
  if (month == 2 && is_leap(year)) return 29;
  return lengths[static_cast<size_t>(month - 1)];
}

Instant sub_months(Instant t, int months) {
  const std::int64_t day = day_index(t);
  const std::int64_t tod = t.sec - day * kSecondsPerDay;
  CivilDate d = civil_from_day(day);
  int total = d.year * 12 + (d.month - 1) - months;
  d.year = static_cast<int>(floor_div(total, 12));
  d.month = static_cast<int>(total - static_cast<std::int64_t>(d.year) * 12) + 1;
  const int dim = days_in_month(d.year, d.month);
  if (d.day > dim) d.day = dim;
  return {day_from_civil(d) * kSecondsPerDay + tod};
}

CivilDate parse_date(std::string_view s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-')
    fail("malformed date '" + std::string(s) + "', expected YYYY-MM-DD");
  CivilDate d;
  d.year = parse_int(s, 0, 4, "year");
  d.month = parse_int(s, 5, 2, "month");
  d.day = parse_int(s, 8, 2, "day");
  if (d.month < 1 || d.month > 12 || d.day < 1 || d.day > days_in_month(d.year, d.month))
    fail("date '" + std::string(s) + "' is out of range");
  return d;
}

Instant parse_instant(std::string_view s) {
  if (s.size() == 10) return {day_from_civil(parse_date(s)) * kSecondsPerDay};
  if (s.size() < 20) fail("malformed timestamp '" + std::string(s) + "'");
  const CivilDate d = parse_date(s.substr(0, 10));
  if (s[10] != 'T' && s[10] != 't' && s[10] != ' ')
    fail("malformed timestamp '" + std::string(s) + "', expected 'T' separator");
  const int hh = parse_int(s, 11, 2, "hour");
  const int mm = parse_int(s, 14, 2, "minute");
  const int ss = parse_int(s, 17, 2, "second");
  if (s[13] != ':' || s[16] != ':' || hh > 23 || mm > 59 || ss > 60)
    fail("malformed time in timestamp '" + std::string(s) + "'");
  size_t pos = 19;
  if (pos < s.size() && s[pos] == '.') {  // fractional seconds: truncate
    ++pos;
    const size_t start = pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos == start) fail("malformed fraction in timestamp '" + std::string(s) + "'");
  }
  if (pos >= s.size()) fail("timestamp '" + std::string(s) + "' is missing a UTC offset");
  std::int64_t offset = 0;
  if (s[pos] == 'Z' || s[pos] == 'z') {
    ++pos;
  } else if (s[pos] == '+' || s[pos] == '-') {
    const int sign = s[pos] == '-' ? -1 : 1;
    const int oh = parse_int(s, pos + 1, 2, "offset hour");
    if (pos + 3 >= s.size() || s[pos + 3] != ':')
      fail("malformed offset in timestamp '" + std::string(s) + "'");
    const int om = parse_int(s, pos + 4, 2, "offset minute");
    offset = sign * (oh * 3600 + om * 60);
    pos += 6;
  } else {
    fail("malformed offset in timestamp '" + std::string(s) + "'");
  }
  if (pos != s.size()) fail("trailing characters in timestamp '" + std::string(s) + "'");
  const std::int64_t sec =
      day_from_civil(d) * kSecondsPerDay + hh * 3600 + mm * 60 + (ss == 60 ? 59 : ss);
  return {sec - offset};
}

std::string format_rfc3339(Instant t) {
  const std::int64_t day = day_index(t);
  std::int64_t tod = t.sec - day * kSecondsPerDay;
  const CivilDate d = civil_from_day(day);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", d.year, d.month, d.day,
                static_cast<int>(tod / 3600), static_cast<int>(tod / 60 % 60),
                static_cast<int>(tod % 60));
  return buf;
}

std::string format_date(CivilDate d) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", d.year, d.month, d.day);
  return buf;
}

std::string format_date(Instant t) { return format_date(civil_from_day(day_index(t))); }

}  // namespace eed
