#include "littag/citations.hpp"

#include <algorithm>
#include <map>

#include "littag/csv.hpp"
#include "littag/error.hpp"
#include "littag/text.hpp"

namespace littag {

bool is_carried_column(std::string_view name) noexcept {
  return std::find(kCarriedColumns.begin(), kCarriedColumns.end(), name) != kCarriedColumns.end();
}

std::string_view CitationRecord::carried(std::string_view column) const noexcept {
  if (column == "Key") return key;
  if (column == "Item Type") return item_type;
  if (column == "Author") return author;
  if (column == "Publication Year") return publication_year;
  if (column == "Title") return title;
  if (column == "Publication Title") return publication_title;
  if (column == "DOI") return doi;
  if (column == "Url") return url;
  if (column == "Abstract Note") return abstract_note;
  if (column == "Date Added") return date_added;
  return {};
}

namespace {

std::string* carried_slot(CitationRecord& rec, std::string_view column) {
  if (column == "Key") return &rec.key;
  if (column == "Item Type") return &rec.item_type;
  if (column == "Author") return &rec.author;
  if (column == "Publication Year") return &rec.publication_year;
  if (column == "Title") return &rec.title;
  if (column == "Publication Title") return &rec.publication_title;
  if (column == "DOI") return &rec.doi;
  if (column == "Url") return &rec.url;
  if (column == "Abstract Note") return &rec.abstract_note;
  if (column == "Date Added") return &rec.date_added;
  return nullptr;
}

}  // namespace

ZoteroExport parse_zotero_export(std::string_view csv_bytes) {
  auto rows = csv::parse(csv_bytes);
  if (rows.empty()) throw Error(ErrorCode::MissingRequiredColumn, "Key");

  ZoteroExport out;
  out.header = std::move(rows.front());
  for (auto required : kRequiredExportColumns) {
    if (std::find(out.header.begin(), out.header.end(), required) == out.header.end()) {
      throw Error(ErrorCode::MissingRequiredColumn, std::string(required));
    }
  }

  // Record number as a user would count lines in a spreadsheet: header is 1.
  std::map<std::string, std::size_t> first_seen;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    auto& row = rows[r];
    if (csv::is_blank(row)) continue;
    if (row.size() > out.header.size()) {
      throw Error(ErrorCode::MalformedCsv, "record " + std::to_string(r + 1) + " has " + std::to_string(row.size()) +
                                               " fields, header has " + std::to_string(out.header.size()));
    }
    row.resize(out.header.size());
    CitationRecord rec;
    for (std::size_t c = 0; c < out.header.size(); ++c) {
      if (auto* slot = carried_slot(rec, out.header[c])) {
        *slot = std::move(row[c]);
      } else {
        rec.extras.emplace_back(out.header[c], std::move(row[c]));
      }
    }
    if (rec.key.empty()) throw Error(ErrorCode::EmptyKey, "record " + std::to_string(r + 1));
    auto [it, inserted] = first_seen.emplace(rec.key, r + 1);
    if (!inserted) {
      throw Error(ErrorCode::DuplicateKey,
                  rec.key + " (records " + std::to_string(it->second) + " and " + std::to_string(r + 1) + ")");
    }
    out.records.push_back(std::move(rec));
  }
  return out;
}

std::string write_zotero_export(const ZoteroExport& exp) {
  std::string out;
  csv::append_row(out, exp.header);
  for (const auto& rec : exp.records) {
    csv::Row row;
    row.reserve(exp.header.size());
    std::size_t extra = 0;
    for (const auto& column : exp.header) {
      if (is_carried_column(column)) {
        row.emplace_back(rec.carried(column));
      } else if (extra < rec.extras.size() && rec.extras[extra].first == column) {
        row.push_back(rec.extras[extra++].second);
      } else {
        auto it = std::find_if(rec.extras.begin(), rec.extras.end(), [&](const auto& kv) { return kv.first == column; });
        row.push_back(it == rec.extras.end() ? std::string{} : it->second);
      }
    }
    csv::append_row(out, row);
  }
  return out;
}

std::string doi_signature(std::string_view doi) {
  auto trimmed = text::trim(doi);
  constexpr std::string_view prefix = "https://doi.org/";
  if (text::starts_with_ci(trimmed, prefix)) trimmed.remove_prefix(prefix.size());
  trimmed = text::trim(trimmed);
  if (trimmed.empty()) return {};
  return "doi:" + text::to_lower(trimmed);
}

std::string title_year_signature(std::string_view title, std::string_view year) {
  std::string folded;
  bool pending_space = false;
  for (char c : title) {
    auto u = static_cast<unsigned char>(c);
    bool alnum = (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || u >= 0x80;
    if (!alnum) {
      pending_space = !folded.empty();
      continue;
    }
    if (pending_space) folded += ' ';
    pending_space = false;
    folded += (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
  }
  if (folded.empty()) return {};
  auto y = text::trim(year);
  std::string sig = "ty:" + folded;
  if (!y.empty()) {
    sig += ' ';
    sig += y;
  }
  return sig;
}

MatchIndex build_match_index(const ZoteroExport& exp) {
  std::map<std::string, std::vector<std::string>> owners;
  MatchIndex index;
  for (const auto& rec : exp.records) {
    auto doi = doi_signature(rec.doi);
    auto ty = title_year_signature(rec.title, rec.publication_year);
    if (doi.empty() && ty.empty()) {
      index.unmatchable.push_back(rec.key);
      continue;
    }
    if (!doi.empty()) owners[doi].push_back(rec.key);
    if (!ty.empty()) owners[ty].push_back(rec.key);
  }
  for (auto& [sig, keys] : owners) {
    if (keys.size() == 1) {
      index.signature_to_key.emplace(sig, keys.front());
    } else {
      index.ambiguous.emplace(sig, std::move(keys));
    }
  }
  return index;
}

MatchIndex citation_match_index(const ZoteroExport& exp) {
  auto index = build_match_index(exp);
  if (!index.ambiguous.empty()) {
    const auto& [sig, keys] = *index.ambiguous.begin();
    throw Error(ErrorCode::AmbiguousSignature, sig + " shared by " + text::join(keys, ", "));
  }
  return index;
}

}  // namespace littag
