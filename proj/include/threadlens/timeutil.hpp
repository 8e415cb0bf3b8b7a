#pragma once

#include <charconv>
#include <chrono>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

namespace threadlens {

/// UTC instant at second precision.
using timestamp = std::chrono::sys_seconds;

namespace detail {

inline bool parse_fixed(std::string_view s, std::size_t pos, std::size_t len, int& value) {
  if (pos + len > s.size()) return false;
  for (std::size_t i = pos; i < pos + len; ++i)
    if (s[i] < '0' || s[i] > '9') return false;
  auto [ptr, ec] = std::from_chars(s.data() + pos, s.data() + pos + len, value);
  return ec == std::errc{} && ptr == s.data() + pos + len;
}

}  // namespace detail

/// Parses "YYYY-MM-DD", "YYYY-MM-DDThh:mm:ss" with an optional fractional
/// part (truncated) and an optional "Z" or "+00:00" suffix. A space is
/// accepted in place of 'T'. Non-UTC offsets are rejected.
inline std::optional<timestamp> parse_iso8601(std::string_view s) {
  using namespace std::chrono;
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, sec = 0;
  if (!detail::parse_fixed(s, 0, 4, y) || s.size() < 10 || s[4] != '-' || s[7] != '-' ||
      !detail::parse_fixed(s, 5, 2, mo) || !detail::parse_fixed(s, 8, 2, d))
    return std::nullopt;
  std::size_t pos = 10;
  if (pos < s.size()) {
    if (s[pos] != 'T' && s[pos] != 't' && s[pos] != ' ') return std::nullopt;
    if (s.size() < pos + 9 || s[pos + 3] != ':' || s[pos + 6] != ':' ||
        !detail::parse_fixed(s, pos + 1, 2, h) || !detail::parse_fixed(s, pos + 4, 2, mi) ||
        !detail::parse_fixed(s, pos + 7, 2, sec))
      return std::nullopt;
    pos += 9;
    if (pos < s.size() && s[pos] == '.') {
      ++pos;
      std::size_t digits = 0;
      while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') ++pos, ++digits;
      if (digits == 0) return std::nullopt;
    }
    std::string_view zone = s.substr(pos);
    if (!(zone.empty() || zone == "Z" || zone == "z" || zone == "+00:00" || zone == "-00:00" ||
          zone == "+0000"))
      return std::nullopt;
  }
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || sec > 59) return std::nullopt;
  return sys_days{ymd} + hours{h} + minutes{mi} + seconds{sec};
}

/// Formats as "YYYY-MM-DDThh:mm:ssZ".
inline std::string format_iso8601(timestamp t) {
  using namespace std::chrono;
  const auto day_start = floor<days>(t);
  const year_month_day ymd{day_start};
  const hh_mm_ss hms{t - day_start};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  return buf;
}

inline timestamp now_utc() {
  return std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
}

}  // namespace threadlens
