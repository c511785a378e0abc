#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

// Small string helpers shared by the parsers. ASCII-only case folding; bytes
// >= 0x80 pass through untouched so UTF-8 text is never mangled.
namespace littag::text {

std::string_view trim(std::string_view s) noexcept;
std::string to_lower(std::string_view s);
bool iequals(std::string_view a, std::string_view b) noexcept;
bool icontains(std::string_view haystack, std::string_view needle) noexcept;
std::vector<std::string> split(std::string_view s, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);
bool starts_with_ci(std::string_view s, std::string_view prefix) noexcept;

// 64-bit FNV-1a rendered as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);

// Strips a UTF-8 byte-order mark if present.
std::string_view strip_bom(std::string_view s) noexcept;

// Parses an optionally signed decimal number ("12", "-3.5", "0.25").
// Rejects exponents, hex, inf/nan and surrounding whitespace.
bool parse_decimal(std::string_view s, double& out) noexcept;

}  // namespace littag::text
