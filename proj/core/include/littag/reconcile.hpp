#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "littag/citations.hpp"
#include "littag/database.hpp"

namespace littag {

// --- sync --------------------------------------------------------------------

struct ColumnChange {
  std::string column;
  std::string old_value;
  std::string new_value;
  friend bool operator==(const ColumnChange&, const ColumnChange&) = default;
};

struct CitationUpdate {
  std::string key;
  std::vector<ColumnChange> changes;
  friend bool operator==(const CitationUpdate&, const CitationUpdate&) = default;
};

struct SyncReport {
  std::vector<std::string> added;
  // Full rows (tags included) dropped because their key left the export.
  std::vector<DatabaseRow> removed;
  std::vector<CitationUpdate> updated;

  bool empty() const noexcept { return added.empty() && removed.empty() && updated.empty(); }
};

struct SyncResult {
  TagDatabase db;
  SyncReport report;
};

// Aligns the key set with the export: new keys appended with empty tags,
// missing keys removed (kept in the report), citation columns refreshed.
SyncResult sync(const TagDatabase& db, const ZoteroExport& exp);

// A database holding only the given rows, for the removed-rows archive.
TagDatabase archive_of(const TagDatabase& like, const std::vector<DatabaseRow>& rows);

// --- diff --------------------------------------------------------------------

struct CellChange {
  std::string key;
  std::string column;
  std::string value_a;
  std::string value_b;
  friend bool operator==(const CellChange&, const CellChange&) = default;
};

struct DiffReport {
  std::vector<std::string> only_in_a;
  std::vector<std::string> only_in_b;
  std::vector<CellChange> changed;
  std::vector<std::string> columns_only_in_a;
  std::vector<std::string> columns_only_in_b;

  bool empty() const noexcept {
    return only_in_a.empty() && only_in_b.empty() && changed.empty() && columns_only_in_a.empty() &&
           columns_only_in_b.empty();
  }
  friend bool operator==(const DiffReport&, const DiffReport&) = default;
};

// Compares serialized cells of the shared columns for the shared keys.
DiffReport diff(const KeyedTable& a, const KeyedTable& b);
DiffReport diff(const TagDatabase& a, const TagDatabase& b);

// --- merge -------------------------------------------------------------------

enum class MergePolicy { Error, FirstWins, LastWins };

std::string_view to_string(MergePolicy policy) noexcept;
// "error" | "first-wins" | "last-wins" (also accepts FirstWins style names).
MergePolicy parse_merge_policy(std::string_view text);

struct DuplicateResolution {
  std::string key;
  std::vector<std::size_t> sources;  // indices of the inputs containing the key
  std::size_t winner = 0;            // index of the input whose row was kept
  bool identical = false;            // all copies were equal
  friend bool operator==(const DuplicateResolution&, const DuplicateResolution&) = default;
};

struct MergeReport {
  std::vector<std::size_t> source_rows;
  std::size_t output_rows = 0;
  MergePolicy policy = MergePolicy::Error;
  std::vector<DuplicateResolution> duplicates;
};

struct MergeResult {
  TagDatabase db;
  MergeReport report;
};

struct TableMergeResult {
  KeyedTable table;
  MergeReport report;
};

// Row union in first-occurrence order. Requires at least two inputs with
// identical headers. Under MergePolicy::Error any duplicate key whose copies
// differ raises DuplicateKeyConflict; identical copies are accepted.
MergeResult merge(const std::vector<TagDatabase>& dbs, MergePolicy policy);
TableMergeResult merge(const std::vector<KeyedTable>& tables, MergePolicy policy);

// --- relink ------------------------------------------------------------------

enum class MatchedBy { Doi, TitleYear };
std::string_view to_string(MatchedBy by) noexcept;

struct RelinkPair {
  std::string old_key;
  std::string new_key;
  MatchedBy by = MatchedBy::Doi;
  friend bool operator==(const RelinkPair&, const RelinkPair&) = default;
};

struct AmbiguousMatch {
  std::string signature;
  std::vector<std::string> keys;  // export keys and/or database keys involved
  friend bool operator==(const AmbiguousMatch&, const AmbiguousMatch&) = default;
};

struct RelinkReport {
  std::vector<RelinkPair> matched;
  std::vector<std::string> unmatched_rows;     // database keys kept as-is
  std::vector<std::string> unmatched_records;  // export keys not added
  std::vector<AmbiguousMatch> ambiguous;
};

struct RelinkResult {
  TagDatabase db;
  RelinkReport report;
};

// Re-keys rows against another library's export, matching DOI first and
// normalized title+year second. Tag cells are never touched.
RelinkResult relink(const TagDatabase& db, const ZoteroExport& exp);

}  // namespace littag
