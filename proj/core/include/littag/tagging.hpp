#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "littag/database.hpp"

namespace littag {

// Replaces one cell. Throws UnknownKey, UnknownTag, KindMismatch, UnknownOption.
TagDatabase assign(const TagDatabase& db, std::string_view key, std::string_view tag, CellValue value);

// Same as assign, taking the serialized cell form used by the CSV file, the
// CLI and the service ("a; b" for multi, "" to clear). Invalid dates raise
// InvalidCell.
TagDatabase assign_text(const TagDatabase& db, std::string_view key, std::string_view tag, std::string_view value);

// Flips membership of one option in a multi-select cell; removing the last
// option leaves the cell empty.
TagDatabase toggle_option(const TagDatabase& db, std::string_view key, std::string_view tag, std::string_view option);

TagDatabase clear(const TagDatabase& db, std::string_view key, std::string_view tag);

// Empties every cell of one tag; the column stays.
TagDatabase delete_tag_data(const TagDatabase& db, std::string_view tag);

struct LabelCount {
  std::string label;
  std::size_t count = 0;
  friend bool operator==(const LabelCount&, const LabelCount&) = default;
};

inline constexpr std::string_view kNonEmptyLabel = "(non-empty)";

struct TagCounts {
  std::string tag;
  TagKind kind = TagKind::Text;
  // Selection tags: every option in schema order, then "(none)".
  // Other kinds: "(non-empty)" then "(none)".
  std::vector<LabelCount> entries;

  std::size_t count(std::string_view label) const noexcept;
  friend bool operator==(const TagCounts&, const TagCounts&) = default;
};

struct OptionCounts {
  std::size_t rows = 0;  // size of the counted row set
  std::vector<TagCounts> tags;  // schema order

  const TagCounts* find(std::string_view tag) const noexcept;
  friend bool operator==(const OptionCounts&, const OptionCounts&) = default;
};

// Counts over the given keys, or over every row when `keys` is nullopt.
// Throws UnknownKey for keys not in the database.
OptionCounts option_counts(const TagDatabase& db, const std::optional<std::vector<std::string>>& keys = std::nullopt);

struct ReplaceResult {
  TagDatabase db;
  std::size_t cells_changed = 0;
  // True when the new option already existed and the two were merged.
  bool merged = false;
  // Edit to apply to the categories file; db.schema() already reflects it.
  SchemaDelta delta;
};

// Renames (or merges) an option everywhere it appears.
// Throws UnknownTag, KindMismatch, UnknownOption (old), InvalidOption (new).
ReplaceResult replace_option(const TagDatabase& db, std::string_view tag, std::string_view old_option,
                             std::string_view new_option);

}  // namespace littag
