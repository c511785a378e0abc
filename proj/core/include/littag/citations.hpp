#pragma once

#include <array>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace littag {

// Zotero export headers that the database carries, in database column order.
// "Key" is always first.
inline constexpr std::array<std::string_view, 10> kCarriedColumns = {
    "Key",   "Item Type", "Author", "Publication Year", "Title", "Publication Title",
    "DOI",   "Url",       "Abstract Note", "Date Added"};

// Headers an export must contain.
inline constexpr std::array<std::string_view, 4> kRequiredExportColumns = {"Key", "Item Type", "Author", "Title"};

bool is_carried_column(std::string_view name) noexcept;

struct CitationRecord {
  std::string key;
  std::string item_type;
  std::string author;
  std::string title;
  std::string publication_year;
  std::string publication_title;
  std::string doi;
  std::string url;
  std::string abstract_note;
  std::string date_added;
  // Every other export column, in header order, verbatim.
  std::vector<std::pair<std::string, std::string>> extras;

  // Value of a carried column by header name; empty for unknown names.
  std::string_view carried(std::string_view column) const noexcept;

  friend bool operator==(const CitationRecord&, const CitationRecord&) = default;
};

struct ZoteroExport {
  std::vector<std::string> header;
  std::vector<CitationRecord> records;

  friend bool operator==(const ZoteroExport&, const ZoteroExport&) = default;
};

ZoteroExport parse_zotero_export(std::string_view csv_bytes);

// Header plus one row per record; fields quoted only when needed.
std::string write_zotero_export(const ZoteroExport& exp);

// --- Matching signatures ---------------------------------------------------

// "doi:<lowercased, trimmed, without https://doi.org/>"; empty when no DOI.
std::string doi_signature(std::string_view doi);

// "ty:<title folded to lowercase alphanumeric words> <year>"; empty when
// the title has no alphanumeric content.
std::string title_year_signature(std::string_view title, std::string_view year);

struct MatchIndex {
  std::map<std::string, std::string> signature_to_key;
  // Signatures shared by more than one record; excluded from the map above.
  std::map<std::string, std::vector<std::string>> ambiguous;
  // Records with neither a DOI nor a usable title.
  std::vector<std::string> unmatchable;
};

// Lenient variant used by relink: collisions go to `ambiguous`.
MatchIndex build_match_index(const ZoteroExport& exp);

// Throws Error(AmbiguousSignature) on the first colliding signature.
MatchIndex citation_match_index(const ZoteroExport& exp);

}  // namespace littag
