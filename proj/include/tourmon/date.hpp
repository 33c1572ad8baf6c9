#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

#include "tourmon/error.hpp"

namespace tourmon {

// Calendar date (UTC, no time zone math anywhere in the toolkit).
struct Date {
  int year = 0;
  unsigned month = 1;
  unsigned day = 1;

  auto operator<=>(const Date&) const = default;

  std::chrono::sys_days to_days() const {
    return std::chrono::sys_days{std::chrono::year{year} /
                                 std::chrono::month{month} /
                                 std::chrono::day{day}};
  }

  bool valid() const {
    auto ymd = std::chrono::year{year} / std::chrono::month{month} /
               std::chrono::day{day};
    return ymd.ok();
  }

  std::string str() const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", year, month, day);
    return buf;
  }
};

inline std::optional<Date> try_parse_date(std::string_view s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
  int y = 0;
  unsigned m = 0, d = 0;
  for (int i = 0; i < 4; ++i) {
    if (s[i] < '0' || s[i] > '9') return std::nullopt;
    y = y * 10 + (s[i] - '0');
  }
  for (int i = 5; i < 7; ++i) {
    if (s[i] < '0' || s[i] > '9') return std::nullopt;
    m = m * 10 + static_cast<unsigned>(s[i] - '0');
  }
  for (int i = 8; i < 10; ++i) {
    if (s[i] < '0' || s[i] > '9') return std::nullopt;
    d = d * 10 + static_cast<unsigned>(s[i] - '0');
  }
  Date date{y, m, d};
  if (!date.valid()) return std::nullopt;
  return date;
}

inline Date parse_date(std::string_view s) {
  auto d = try_parse_date(s);
  if (!d) throw ParseError("invalid date: '" + std::string(s) + "'");
  return *d;
}

inline int days_between(const Date& from, const Date& to) {
  return static_cast<int>((to.to_days() - from.to_days()).count());
}

// UTC timestamp with second resolution, serialized as RFC 3339 "Z" form.
struct Timestamp {
  std::int64_t seconds = 0;  // since Unix epoch

  auto operator<=>(const Timestamp&) const = default;

  static Timestamp now() {
    using namespace std::chrono;
    return Timestamp{
        duration_cast<std::chrono::seconds>(system_clock::now().time_since_epoch())
            .count()};
  }

  std::string rfc3339() const {
    using namespace std::chrono;
    sys_days days_part{std::chrono::days{seconds / 86400 -
                                         (seconds % 86400 < 0 ? 1 : 0)}};
    std::int64_t rem = seconds - sys_days{days_part}.time_since_epoch().count() *
                                     static_cast<std::int64_t>(86400);
    year_month_day ymd{days_part};
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02dZ",
                  static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()),
                  static_cast<int>(rem / 3600), static_cast<int>(rem / 60 % 60),
                  static_cast<int>(rem % 60));
    return buf;
  }
};

inline std::optional<Timestamp> try_parse_rfc3339(std::string_view s) {
  // Accepts YYYY-MM-DDThh:mm:ssZ (the sidecar format).
  if (s.size() != 20 || s[10] != 'T' || s[19] != 'Z' || s[13] != ':' ||
      s[16] != ':')
    return std::nullopt;
  auto date = try_parse_date(s.substr(0, 10));
  if (!date) return std::nullopt;
  auto num2 = [&](std::size_t off) -> int {
    if (s[off] < '0' || s[off] > '9' || s[off + 1] < '0' || s[off + 1] > '9')
      return -1;
    return (s[off] - '0') * 10 + (s[off + 1] - '0');
  };
  int h = num2(11), m = num2(14), sec = num2(17);
  if (h < 0 || h > 23 || m < 0 || m > 59 || sec < 0 || sec > 60)
    return std::nullopt;
  std::int64_t day_secs =
      date->to_days().time_since_epoch().count() * static_cast<std::int64_t>(86400);
  return Timestamp{day_secs + h * 3600 + m * 60 + sec};
}

inline Timestamp parse_rfc3339(std::string_view s) {
  auto t = try_parse_rfc3339(s);
  if (!t) throw ParseError("invalid RFC 3339 timestamp: '" + std::string(s) + "'");
  return *t;
}

}  // namespace tourmon
