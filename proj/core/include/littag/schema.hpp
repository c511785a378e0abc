#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace littag {

enum class TagKind { Single, Multi, Date, Text, Note };

std::string_view to_string(TagKind kind) noexcept;

// Case-insensitive keyword lookup ("single selection", "multi", "notes", ...).
std::optional<TagKind> parse_tag_kind(std::string_view keyword) noexcept;

constexpr bool is_selection(TagKind kind) noexcept { return kind == TagKind::Single || kind == TagKind::Multi; }

// Pseudo-option used by counts and cross-tabs for untagged papers. Schemas
// may not declare it.
inline constexpr std::string_view kNoneLabel = "(none)";

struct TagDefinition {
  std::string name;
  TagKind kind = TagKind::Text;
  std::vector<std::string> options;  // selection kinds only, in display order
  std::string group;

  std::optional<std::size_t> option_index(std::string_view option) const noexcept;
  bool has_option(std::string_view option) const noexcept { return option_index(option).has_value(); }

  friend bool operator==(const TagDefinition&, const TagDefinition&) = default;
};

struct TagGroup {
  std::string name;
  std::vector<TagDefinition> tags;

  friend bool operator==(const TagGroup&, const TagGroup&) = default;
};

/// The user-authored categories file: ordered groups of tag definitions.
///
/// Equality is structural and ignores the fingerprint field; the fingerprint
/// itself is a hash of the canonical CSV-table rendering, so two schemas
/// parsed from a workbook and from the equivalent CSV directory share it.
class CategoriesSchema {
 public:
  CategoriesSchema() = default;

  // Validates every schema invariant; throws littag::Error on violation.
  explicit CategoriesSchema(std::vector<TagGroup> groups);

  // Builds without validation. Intended for tests and for callers that
  // need to check invariants separately via validate().
  static CategoriesSchema unchecked(std::vector<TagGroup> groups);

  const std::vector<TagGroup>& groups() const noexcept { return groups_; }
  const std::string& fingerprint() const noexcept { return fingerprint_; }

  // Tags in group order, then in-group order.
  std::vector<const TagDefinition*> tags() const;

  // Database column order: non-note tags in schema order, then note tags.
  std::vector<const TagDefinition*> columns() const;

  const TagDefinition* find(std::string_view name) const noexcept;
  std::size_t tag_count() const noexcept;

  // Re-checks all invariants, including the reserved citation column names.
  void validate() const;

  friend bool operator==(const CategoriesSchema& a, const CategoriesSchema& b) { return a.groups_ == b.groups_; }

 private:
  std::vector<TagGroup> groups_;
  std::string fingerprint_;
};

// --- Parsing ---------------------------------------------------------------

// One per-group table as read from disk or an upload.
struct GroupTable {
  std::string group;
  std::string csv_bytes;
};

// Parses already-split cell grids (one per group). Shared by the CSV and
// workbook paths.
CategoriesSchema parse_categories_grids(const std::vector<std::pair<std::string, std::vector<std::vector<std::string>>>>& grids);

CategoriesSchema parse_categories_tables(const std::vector<GroupTable>& tables);
CategoriesSchema parse_categories_workbook(std::string_view xlsx_bytes);

// Directory of "<Group>.csv" files (group order = filename order) or a single
// .xlsx workbook.
CategoriesSchema load_categories(const std::string& path);

// Canonical per-group CSV tables (inverse of parse_categories_tables).
std::vector<GroupTable> to_group_tables(const CategoriesSchema& schema);
void write_categories_dir(const CategoriesSchema& schema, const std::string& dir);

// --- Evolution -------------------------------------------------------------

struct TagOption {
  std::string tag;
  std::string option;
  friend bool operator==(const TagOption&, const TagOption&) = default;
  friend auto operator<=>(const TagOption&, const TagOption&) = default;
};

struct KindChange {
  std::string tag;
  TagKind from;
  TagKind to;
  friend bool operator==(const KindChange&, const KindChange&) = default;
};

struct GroupChange {
  std::string tag;
  std::string from;
  std::string to;
  friend bool operator==(const GroupChange&, const GroupChange&) = default;
};

struct SchemaDelta {
  std::vector<TagDefinition> added_tags;
  std::vector<TagDefinition> removed_tags;
  std::vector<KindChange> kind_changed;
  std::vector<GroupChange> regrouped;
  std::vector<TagOption> added_options;
  std::vector<TagOption> removed_options;

  bool empty() const noexcept {
    return added_tags.empty() && removed_tags.empty() && kind_changed.empty() && regrouped.empty() &&
           added_options.empty() && removed_options.empty();
  }
  friend bool operator==(const SchemaDelta&, const SchemaDelta&) = default;
};

SchemaDelta schema_diff(const CategoriesSchema& from, const CategoriesSchema& to);

// Applies a delta. Added tags and options are appended (to their group, which
// is created when missing), so the result matches the target schema up to
// ordering; see same_membership().
CategoriesSchema apply_delta(const CategoriesSchema& schema, const SchemaDelta& delta);

// Order-insensitive comparison: same tags, same kinds, same groups, same
// option sets.
bool same_membership(const CategoriesSchema& a, const CategoriesSchema& b);

}  // namespace littag
