#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "littag/database.hpp"
#include "littag/filter.hpp"

namespace littag {

// Throws UnknownColumn unless every referenced column is in db.header().
void bind_filter(const TagDatabase& db, const FilterExpr& expr);

// Row indices (ascending) where the expression holds.
//
// Empty cells make every comparison, has() and contains() false.
// == and != compare numerically when the literal is a number and the cell
// parses as one, otherwise as case-sensitive strings on the serialized cell.
// Ordering operators compare numerically when both sides parse as numbers,
// as dates on date columns, and by bytes otherwise. has() tests membership
// on multi columns and equality elsewhere; contains() is a case-insensitive
// substring test on the serialized cell.
std::vector<std::size_t> filter_rows(const TagDatabase& db, const FilterExpr& expr);

// Keys of the matching rows, in database order.
std::vector<std::string> eval_filter(const TagDatabase& db, const FilterExpr& expr);

struct CrossTab {
  std::string row_tag;
  std::string col_tag;
  std::vector<std::string> row_labels;  // options in schema order, then "(none)"
  std::vector<std::string> col_labels;
  std::vector<std::vector<std::size_t>> counts;  // [row label][col label]
  std::size_t filtered_rows = 0;

  std::size_t at(std::string_view row_label, std::string_view col_label) const;
  std::size_t total() const noexcept;
};

// Throws UnknownTag, KindNotTabulable (date/text/note), UnknownColumn.
CrossTab crosstab(const TagDatabase& db, std::string_view row_tag, std::string_view col_tag,
                  const std::optional<FilterExpr>& filter = std::nullopt);

// CSV of the matching rows: "Key" first, then the requested columns (a
// repeated "Key" is dropped). Cells serialize exactly as in the database file.
std::string export_table(const TagDatabase& db, const std::vector<std::string>& columns,
                         const std::optional<FilterExpr>& filter = std::nullopt);

}  // namespace littag
