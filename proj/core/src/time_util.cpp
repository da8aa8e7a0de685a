#include "wxr/time_util.hpp"

#include <charconv>
#include <cstdio>
#include <string>

#include "wxr/error.hpp"

namespace wxr {

std::string format_utc(TimePoint t) {
  using namespace std::chrono;
  const auto day = floor<days>(t);
  const year_month_day ymd{day};
  const hh_mm_ss hms{t - day};
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02ldZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<long>(hms.hours().count()), static_cast<long>(hms.minutes().count()),
                static_cast<long>(hms.seconds().count()));
  return buf;
}

namespace {

int parse_field(std::string_view text, std::size_t pos, std::size_t len) {
  int value = 0;
  if (pos + len > text.size()) throw Error(Errc::InvalidArgument, "malformed timestamp: " + std::string(text));
  const char* first = text.data() + pos;
  auto [ptr, ec] = std::from_chars(first, first + len, value);
  if (ec != std::errc{} || ptr != first + len) {
    throw Error(Errc::InvalidArgument, "malformed timestamp: " + std::string(text));
  }
  return value;
}

}  // namespace

TimePoint parse_utc(std::string_view text) {
  using namespace std::chrono;
  if (!text.empty() && text.back() == 'Z') text.remove_suffix(1);
  // YYYY-MM-DD[T ]HH:MM[:SS]
  if (text.size() != 16 && text.size() != 19) {
    throw Error(Errc::InvalidArgument, "malformed timestamp: " + std::string(text));
  }
  if (text[4] != '-' || text[7] != '-' || (text[10] != 'T' && text[10] != ' ') || text[13] != ':' ||
      (text.size() == 19 && text[16] != ':')) {
    throw Error(Errc::InvalidArgument, "malformed timestamp: " + std::string(text));
  }
  const year_month_day ymd{year{parse_field(text, 0, 4)}, month{static_cast<unsigned>(parse_field(text, 5, 2))},
                           day{static_cast<unsigned>(parse_field(text, 8, 2))}};
  if (!ymd.ok()) throw Error(Errc::InvalidArgument, "invalid date: " + std::string(text));
  const int h = parse_field(text, 11, 2);
  const int m = parse_field(text, 14, 2);
  const int s = text.size() == 19 ? parse_field(text, 17, 2) : 0;
  if (h > 23 || m > 59 || s > 59) throw Error(Errc::InvalidArgument, "invalid time of day: " + std::string(text));
  return sys_days{ymd} + hours{h} + minutes{m} + seconds{s};
}

}  // namespace wxr
