#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "littag/schema.hpp"

namespace littag {

struct EmptyCell {
  friend bool operator==(const EmptyCell&, const EmptyCell&) = default;
};

struct SingleOption {
  std::string option;
  friend bool operator==(const SingleOption&, const SingleOption&) = default;
};

// Non-empty, duplicate-free, ordered as in the owning tag's option list.
struct MultiOptions {
  std::vector<std::string> options;
  friend bool operator==(const MultiOptions&, const MultiOptions&) = default;
};

struct DateValue {
  std::chrono::year_month_day date;
  friend bool operator==(const DateValue&, const DateValue&) = default;
};

struct TextValue {
  std::string text;
  friend bool operator==(const TextValue&, const TextValue&) = default;
};

struct NoteValue {
  std::string text;
  friend bool operator==(const NoteValue&, const NoteValue&) = default;
};

using CellValue = std::variant<EmptyCell, SingleOption, MultiOptions, DateValue, TextValue, NoteValue>;

inline bool is_empty(const CellValue& v) noexcept { return std::holds_alternative<EmptyCell>(v); }

// Separator between options of a multi-select cell in every serialized form.
inline constexpr std::string_view kMultiSeparator = "; ";

// Database-file form of a cell: "" for empty, "a; b" for multi, ISO dates.
std::string serialize_cell(const CellValue& value);

std::string format_date(std::chrono::year_month_day date);
// Strict YYYY-MM-DD with calendar validation.
std::optional<std::chrono::year_month_day> parse_date(std::string_view text) noexcept;

// Interprets serialized text for a tag. Returns nullopt when the text is not
// a valid value for the tag (unknown option, bad date). Multi members are
// reordered into schema order and deduplicated.
std::optional<CellValue> parse_cell(const TagDefinition& tag, std::string_view text);

// Validates a typed value for a tag and returns its canonical form:
// multi members in schema order, empty multi/text collapsed to EmptyCell.
// Throws KindMismatch or UnknownOption.
CellValue canonical_cell(const TagDefinition& tag, CellValue value);

// Human name of the variant, used in KindMismatch details.
std::string_view variant_name(const CellValue& value) noexcept;

// Options carried by a selection cell; empty for every other variant.
std::vector<std::string_view> cell_options(const CellValue& value);

}  // namespace littag
