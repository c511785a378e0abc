#include "littag/timestamp.hpp"

#include <cstdio>

namespace littag {

namespace {

using namespace std::chrono;

struct Fields {
  int year;
  unsigned month, day, hour, minute, second;
};

Fields split(UtcInstant t) {
  auto day_point = floor<days>(t);
  year_month_day ymd{day_point};
  hh_mm_ss hms{t - day_point};
  return {static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
          static_cast<unsigned>(hms.hours().count()), static_cast<unsigned>(hms.minutes().count()),
          static_cast<unsigned>(hms.seconds().count())};
}

std::optional<UtcInstant> assemble(int y, unsigned mo, unsigned d, unsigned h, unsigned mi, unsigned s) {
  year_month_day ymd{year{y}, month{mo}, day{d}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 59) return std::nullopt;
  return sys_days{ymd} + hours{h} + minutes{mi} + seconds{s};
}

bool digits(std::string_view s, std::size_t pos, std::size_t count, unsigned& out) {
  if (pos + count > s.size()) return false;
  out = 0;
  for (std::size_t i = pos; i < pos + count; ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
    out = out * 10 + static_cast<unsigned>(s[i] - '0');
  }
  return true;
}

}  // namespace

UtcInstant utc_now() { return floor<seconds>(system_clock::now()); }

std::string format_compact_utc(UtcInstant t) {
  auto f = split(t);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d%02u%02uT%02u%02u%02uZ", f.year, f.month, f.day, f.hour, f.minute, f.second);
  return buf;
}

std::optional<UtcInstant> parse_compact_utc(std::string_view s) {
  unsigned y, mo, d, h, mi, sec;
  if (s.size() != 16 || s[8] != 'T' || s[15] != 'Z') return std::nullopt;
  if (!digits(s, 0, 4, y) || !digits(s, 4, 2, mo) || !digits(s, 6, 2, d) || !digits(s, 9, 2, h) ||
      !digits(s, 11, 2, mi) || !digits(s, 13, 2, sec)) {
    return std::nullopt;
  }
  return assemble(static_cast<int>(y), mo, d, h, mi, sec);
}

std::string format_iso_utc(UtcInstant t) {
  auto f = split(t);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02u:%02u:%02uZ", f.year, f.month, f.day, f.hour, f.minute,
                f.second);
  return buf;
}

std::optional<UtcInstant> parse_iso_utc(std::string_view s) {
  unsigned y, mo, d, h, mi, sec;
  if (s.size() != 20 || s[4] != '-' || s[7] != '-' || s[10] != 'T' || s[13] != ':' || s[16] != ':' ||
      s[19] != 'Z') {
    return std::nullopt;
  }
  if (!digits(s, 0, 4, y) || !digits(s, 5, 2, mo) || !digits(s, 8, 2, d) || !digits(s, 11, 2, h) ||
      !digits(s, 14, 2, mi) || !digits(s, 17, 2, sec)) {
    return std::nullopt;
  }
  return assemble(static_cast<int>(y), mo, d, h, mi, sec);
}

std::string versioned_filename(std::string_view base, UtcInstant t) {
  std::string out(base);
  out += '_';
  out += format_compact_utc(t);
  out += ".csv";
  return out;
}

std::optional<VersionName> parse_versioned_filename(std::string_view filename) {
  constexpr std::string_view ext = ".csv";
  // base + '_' + 16-char stamp + ".csv"
  if (filename.size() < 1 + 16 + ext.size() + 1) return std::nullopt;
  if (filename.substr(filename.size() - ext.size()) != ext) return std::nullopt;
  auto stem = filename.substr(0, filename.size() - ext.size());
  auto stamp = stem.substr(stem.size() - 16);
  if (stem[stem.size() - 17] != '_') return std::nullopt;
  auto instant = parse_compact_utc(stamp);
  if (!instant) return std::nullopt;
  return VersionName{std::string(stem.substr(0, stem.size() - 17)), *instant};
}

}  // namespace littag
