#pragma once

#include <chrono>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace littag {

using UtcInstant = std::chrono::sys_seconds;
using Clock = std::function<UtcInstant()>;

UtcInstant utc_now();

// "YYYYMMDDTHHMMSSZ"
std::string format_compact_utc(UtcInstant t);
std::optional<UtcInstant> parse_compact_utc(std::string_view s);

// "YYYY-MM-DDTHH:MM:SSZ", used in reports and JSON metadata.
std::string format_iso_utc(UtcInstant t);
std::optional<UtcInstant> parse_iso_utc(std::string_view s);

struct VersionName {
  std::string base;
  UtcInstant instant;
};

// "<base>_<YYYYMMDD>T<HHMMSS>Z.csv"
std::string versioned_filename(std::string_view base, UtcInstant t);

// Inverse of versioned_filename; nullopt for names that do not follow it.
std::optional<VersionName> parse_versioned_filename(std::string_view filename);

}  // namespace littag
