#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "littag/cell.hpp"
#include "littag/citations.hpp"
#include "littag/csv.hpp"
#include "littag/schema.hpp"
#include "littag/timestamp.hpp"

namespace littag {

// Carried citation columns other than "Key", in file order.
inline constexpr std::size_t kCitationFieldCount = kCarriedColumns.size() - 1;

struct DatabaseRow {
  std::string key;
  std::array<std::string, kCitationFieldCount> citation;  // kCarriedColumns[1..]
  std::vector<CellValue> cells;                          // aligned with TagDatabase::tag_columns()

  // Key or carried citation column by name; empty view for other names.
  std::string_view citation_value(std::string_view column) const noexcept;
  void set_citation(const CitationRecord& rec);

  friend bool operator==(const DatabaseRow&, const DatabaseRow&) = default;
};

/// One row per paper: carried citation columns plus one cell per tag.
///
/// Holds a copy of the schema it was validated against; every non-empty cell
/// satisfies that schema. Operations in tagging/reconcile take a database by
/// const reference and return a new value.
class TagDatabase {
 public:
  TagDatabase() = default;
  explicit TagDatabase(CategoriesSchema schema);

  const CategoriesSchema& schema() const noexcept { return schema_; }
  const std::string& schema_fingerprint() const noexcept { return schema_.fingerprint(); }

  // Database column order of the tag cells (notes last).
  const std::vector<TagDefinition>& tag_columns() const noexcept { return columns_; }
  std::optional<std::size_t> tag_index(std::string_view name) const noexcept;

  // "Key", carried citation columns, then tag columns.
  std::vector<std::string> header() const;

  const std::vector<DatabaseRow>& rows() const noexcept { return rows_; }
  std::size_t size() const noexcept { return rows_.size(); }
  bool empty() const noexcept { return rows_.empty(); }

  const DatabaseRow* find(std::string_view key) const;
  std::optional<std::size_t> row_index(std::string_view key) const;
  bool contains(std::string_view key) const { return row_index(key).has_value(); }

  // Serialized value of any header column for a row.
  std::string cell_text(const DatabaseRow& row, std::string_view column) const;

  // Appends a row; throws DuplicateKey / EmptyKey. Cells are sized to the
  // tag columns (missing cells become EmptyCell) but not validated.
  void append(DatabaseRow row);

  // Mutable access for the operation modules; the caller keeps cells valid.
  DatabaseRow& row_at(std::size_t index) { return rows_.at(index); }
  void set_cell(std::size_t row, std::size_t tag, CellValue value) { rows_.at(row).cells.at(tag) = std::move(value); }
  void remove_rows(const std::vector<std::string>& keys);
  // Changes a key in place; throws DuplicateKey if the new key is taken.
  void rekey(std::size_t row, std::string new_key);
  // Replaces the schema while keeping the column layout (option renames).
  void replace_schema_same_layout(CategoriesSchema schema);

  // Checks every row against the schema; throws InvalidCell.
  void validate() const;

  friend bool operator==(const TagDatabase& a, const TagDatabase& b) {
    return a.schema_ == b.schema_ && a.rows_ == b.rows_;
  }

 private:
  void reindex();

  CategoriesSchema schema_;
  std::vector<TagDefinition> columns_;
  std::vector<DatabaseRow> rows_;
  std::unordered_map<std::string, std::size_t> index_;
};

// One row per export record in export order, every tag cell empty.
// Throws ColumnNameCollision when a tag shares a carried column name.
TagDatabase create_database(const ZoteroExport& exp, const CategoriesSchema& schema);

// --- Persistence -----------------------------------------------------------

std::string serialize_database(const TagDatabase& db);

struct SavedDatabase {
  std::string filename;
  std::string bytes;
};

// filename = "<base>_<YYYYMMDD>T<HHMMSS>Z.csv"; throws InvalidBaseName.
SavedDatabase save_database(const TagDatabase& db, std::string_view base, UtcInstant at);
void check_base_name(std::string_view base);

enum class InvalidCellPolicy { Quarantine, Strict };

std::string_view to_string(InvalidCellPolicy policy) noexcept;

struct RemovedTag {
  std::string name;
  std::size_t dropped_cells = 0;  // non-empty cells lost with the column
  friend bool operator==(const RemovedTag&, const RemovedTag&) = default;
};

struct InvalidatedCell {
  std::string key;
  std::string tag;
  std::string value;
  friend bool operator==(const InvalidatedCell&, const InvalidatedCell&) = default;
};

struct ConformReport {
  std::vector<std::string> tags_added;
  std::vector<RemovedTag> tags_removed;
  std::vector<InvalidatedCell> invalidated;
  InvalidCellPolicy policy = InvalidCellPolicy::Quarantine;
  // Definition changes between the old and new schema (conform only).
  SchemaDelta schema_delta;

  bool empty() const noexcept {
    return tags_added.empty() && tags_removed.empty() && invalidated.empty() && schema_delta.empty();
  }
};

struct LoadResult {
  TagDatabase db;
  ConformReport report;
};

// Throws MissingKeyColumn, DuplicateKey, EmptyKey, MalformedCsv, and under
// the strict policy InvalidCell.
LoadResult load_database(std::string_view csv_bytes, const CategoriesSchema& schema,
                         InvalidCellPolicy policy = InvalidCellPolicy::Quarantine);

LoadResult conform(const TagDatabase& db, const CategoriesSchema& schema,
                   InvalidCellPolicy policy = InvalidCellPolicy::Quarantine);

// --- Schema-free view ------------------------------------------------------

// A keyed CSV table with "Key" moved to column 0. Used where no categories
// file is at hand (raw diffs and merges of database files).
struct KeyedTable {
  std::vector<std::string> header;
  std::vector<csv::Row> rows;
  friend bool operator==(const KeyedTable&, const KeyedTable&) = default;
};

KeyedTable parse_keyed_table(std::string_view csv_bytes);
KeyedTable to_keyed_table(const TagDatabase& db);
std::string serialize_keyed_table(const KeyedTable& table);

}  // namespace littag
