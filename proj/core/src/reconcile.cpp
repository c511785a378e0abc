#include "littag/reconcile.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "littag/error.hpp"
#include "littag/text.hpp"

namespace littag {

// ---------------------------------------------------------------------------
// sync
// ---------------------------------------------------------------------------

SyncResult sync(const TagDatabase& db, const ZoteroExport& exp) {
  std::unordered_map<std::string_view, const CitationRecord*> by_key;
  for (const auto& rec : exp.records) by_key.emplace(rec.key, &rec);

  SyncResult result{TagDatabase(db.schema()), {}};
  for (const auto& row : db.rows()) {
    auto it = by_key.find(row.key);
    if (it == by_key.end()) {
      result.report.removed.push_back(row);
      continue;
    }
    DatabaseRow refreshed = row;
    refreshed.set_citation(*it->second);
    CitationUpdate update{row.key, {}};
    for (std::size_t i = 0; i < kCitationFieldCount; ++i) {
      if (row.citation[i] != refreshed.citation[i]) {
        update.changes.push_back({std::string(kCarriedColumns[i + 1]), row.citation[i], refreshed.citation[i]});
      }
    }
    if (!update.changes.empty()) result.report.updated.push_back(std::move(update));
    result.db.append(std::move(refreshed));
  }
  for (const auto& rec : exp.records) {
    if (db.contains(rec.key)) continue;
    DatabaseRow row;
    row.key = rec.key;
    row.set_citation(rec);
    result.db.append(std::move(row));
    result.report.added.push_back(rec.key);
  }
  return result;
}

TagDatabase archive_of(const TagDatabase& like, const std::vector<DatabaseRow>& rows) {
  TagDatabase out(like.schema());
  for (const auto& row : rows) out.append(row);
  return out;
}

// ---------------------------------------------------------------------------
// diff
// ---------------------------------------------------------------------------

DiffReport diff(const KeyedTable& a, const KeyedTable& b) {
  DiffReport report;
  std::map<std::string_view, std::size_t> col_b;
  for (std::size_t c = 0; c < b.header.size(); ++c) col_b.emplace(b.header[c], c);
  std::set<std::string_view> cols_a(a.header.begin(), a.header.end());

  std::vector<std::pair<std::size_t, std::size_t>> shared;  // (col in a, col in b)
  for (std::size_t c = 0; c < a.header.size(); ++c) {
    auto it = col_b.find(a.header[c]);
    if (it == col_b.end()) {
      report.columns_only_in_a.push_back(a.header[c]);
    } else {
      shared.emplace_back(c, it->second);
    }
  }
  for (const auto& name : b.header) {
    if (!cols_a.count(name)) report.columns_only_in_b.push_back(name);
  }

  std::unordered_map<std::string_view, std::size_t> rows_b;
  for (std::size_t r = 0; r < b.rows.size(); ++r) rows_b.emplace(b.rows[r][0], r);
  std::unordered_set<std::string_view> keys_a;
  for (const auto& row_a : a.rows) {
    keys_a.insert(row_a[0]);
    auto it = rows_b.find(row_a[0]);
    if (it == rows_b.end()) {
      report.only_in_a.push_back(row_a[0]);
      continue;
    }
    const auto& row_b = b.rows[it->second];
    for (auto [ca, cb] : shared) {
      if (row_a[ca] != row_b[cb]) report.changed.push_back({row_a[0], a.header[ca], row_a[ca], row_b[cb]});
    }
  }
  for (const auto& row_b : b.rows) {
    if (!keys_a.count(row_b[0])) report.only_in_b.push_back(row_b[0]);
  }
  return report;
}

DiffReport diff(const TagDatabase& a, const TagDatabase& b) { return diff(to_keyed_table(a), to_keyed_table(b)); }

// ---------------------------------------------------------------------------
// merge
// ---------------------------------------------------------------------------

std::string_view to_string(MergePolicy policy) noexcept {
  switch (policy) {
    case MergePolicy::Error: return "error";
    case MergePolicy::FirstWins: return "first-wins";
    case MergePolicy::LastWins: return "last-wins";
  }
  return "error";
}

MergePolicy parse_merge_policy(std::string_view s) {
  auto folded = text::to_lower(s);
  folded.erase(std::remove_if(folded.begin(), folded.end(), [](char c) { return c == '-' || c == '_'; }), folded.end());
  if (folded == "error") return MergePolicy::Error;
  if (folded == "firstwins") return MergePolicy::FirstWins;
  if (folded == "lastwins") return MergePolicy::LastWins;
  throw Error(ErrorCode::InvalidRequest, "unknown merge policy '" + std::string(s) + "'");
}

namespace {

struct Placement {
  std::size_t source;
  std::size_t row;
};

// Generic row union. `count(i)`, `key(i, r)` and `equal(i, r, j, s)` describe
// the inputs. Returns the winning (source, row) per output row.
template <class Count, class Key, class Equal>
std::vector<Placement> union_rows(std::size_t inputs, MergePolicy policy, MergeReport& report, Count count, Key key,
                                  Equal equal) {
  std::vector<Placement> out;
  std::unordered_map<std::string, std::size_t> slot;  // key -> output index
  std::map<std::size_t, DuplicateResolution> dups;    // output index -> resolution
  report.policy = policy;
  report.source_rows.clear();

  for (std::size_t i = 0; i < inputs; ++i) {
    report.source_rows.push_back(count(i));
    for (std::size_t r = 0; r < count(i); ++r) {
      std::string k(key(i, r));
      auto [it, fresh] = slot.emplace(k, out.size());
      if (fresh) {
        out.push_back({i, r});
        continue;
      }
      auto& res = dups[it->second];
      if (res.sources.empty()) {
        res.key = k;
        res.sources.push_back(out[it->second].source);
        res.identical = true;
        res.winner = out[it->second].source;
      }
      const auto& first = out[it->second];
      if (res.sources.back() != i) res.sources.push_back(i);
      if (!equal(first.source, first.row, i, r)) res.identical = false;
      if (policy == MergePolicy::LastWins) {
        out[it->second] = {i, r};
        res.winner = i;
      }
    }
  }

  if (policy == MergePolicy::Error) {
    std::vector<std::string> conflicts;
    for (const auto& [idx, res] : dups) {
      if (!res.identical) conflicts.push_back(res.key);
    }
    if (!conflicts.empty()) throw Error(ErrorCode::DuplicateKeyConflict, text::join(conflicts, ", "));
  }
  for (auto& [idx, res] : dups) report.duplicates.push_back(std::move(res));
  report.output_rows = out.size();
  return out;
}

std::string describe_header_mismatch(const std::vector<std::string>& a, const std::vector<std::string>& b,
                                     std::size_t index) {
  std::string detail = "input " + std::to_string(index + 1) + " header differs from input 1";
  for (std::size_t c = 0; c < std::max(a.size(), b.size()); ++c) {
    std::string_view x = c < a.size() ? std::string_view(a[c]) : "<none>";
    std::string_view y = c < b.size() ? std::string_view(b[c]) : "<none>";
    if (x != y) {
      detail += " at column " + std::to_string(c + 1) + " ('" + std::string(x) + "' vs '" + std::string(y) + "')";
      break;
    }
  }
  return detail;
}

}  // namespace

TableMergeResult merge(const std::vector<KeyedTable>& tables, MergePolicy policy) {
  if (tables.size() < 2) throw Error(ErrorCode::NotEnoughDatabases, "merge needs at least two inputs");
  for (std::size_t i = 1; i < tables.size(); ++i) {
    if (tables[i].header != tables[0].header) {
      throw Error(ErrorCode::ColumnSetMismatch, describe_header_mismatch(tables[0].header, tables[i].header, i));
    }
  }
  TableMergeResult result;
  auto placements = union_rows(
      tables.size(), policy, result.report, [&](std::size_t i) { return tables[i].rows.size(); },
      [&](std::size_t i, std::size_t r) -> std::string_view { return tables[i].rows[r][0]; },
      [&](std::size_t i, std::size_t r, std::size_t j, std::size_t s) { return tables[i].rows[r] == tables[j].rows[s]; });
  result.table.header = tables[0].header;
  for (auto p : placements) result.table.rows.push_back(tables[p.source].rows[p.row]);
  return result;
}

MergeResult merge(const std::vector<TagDatabase>& dbs, MergePolicy policy) {
  if (dbs.size() < 2) throw Error(ErrorCode::NotEnoughDatabases, "merge needs at least two inputs");
  const auto header = dbs[0].header();
  for (std::size_t i = 1; i < dbs.size(); ++i) {
    auto other = dbs[i].header();
    if (other != header) throw Error(ErrorCode::ColumnSetMismatch, describe_header_mismatch(header, other, i));
  }

  // Same headers but different definitions: every cell must still be valid
  // under the first schema.
  const auto& columns = dbs[0].tag_columns();
  std::vector<TagDatabase> converted;
  const std::vector<TagDatabase>* inputs = &dbs;
  if (std::any_of(dbs.begin(), dbs.end(), [&](const TagDatabase& d) { return d.schema() != dbs[0].schema(); })) {
    converted.reserve(dbs.size());
    converted.push_back(dbs[0]);
    for (std::size_t i = 1; i < dbs.size(); ++i) {
      TagDatabase copy(dbs[0].schema());
      for (const auto& row : dbs[i].rows()) {
        DatabaseRow fixed = row;
        for (std::size_t t = 0; t < columns.size(); ++t) {
          auto text = serialize_cell(row.cells[t]);
          auto parsed = parse_cell(columns[t], text);
          if (!parsed) {
            throw Error(ErrorCode::ColumnSetMismatch, "input " + std::to_string(i + 1) + " cell " + row.key + "/" +
                                                          columns[t].name + " = '" + text +
                                                          "' is not valid under the first input's categories");
          }
          fixed.cells[t] = std::move(*parsed);
        }
        copy.append(std::move(fixed));
      }
      converted.push_back(std::move(copy));
    }
    inputs = &converted;
  }

  const auto& in = *inputs;
  MergeResult result{TagDatabase(dbs[0].schema()), {}};
  auto placements = union_rows(
      in.size(), policy, result.report, [&](std::size_t i) { return in[i].size(); },
      [&](std::size_t i, std::size_t r) -> std::string_view { return in[i].rows()[r].key; },
      [&](std::size_t i, std::size_t r, std::size_t j, std::size_t s) { return in[i].rows()[r] == in[j].rows()[s]; });
  for (auto p : placements) result.db.append(in[p.source].rows()[p.row]);
  return result;
}

// ---------------------------------------------------------------------------
// relink
// ---------------------------------------------------------------------------

std::string_view to_string(MatchedBy by) noexcept { return by == MatchedBy::Doi ? "doi" : "title-year"; }

RelinkResult relink(const TagDatabase& db, const ZoteroExport& exp) {
  const auto index = build_match_index(exp);
  std::unordered_map<std::string_view, const CitationRecord*> records;
  for (const auto& rec : exp.records) records.emplace(rec.key, &rec);

  struct RowSigs {
    std::string doi;
    std::string title_year;
  };
  std::vector<RowSigs> sigs;
  std::map<std::string, std::vector<std::string>> db_owners;
  for (const auto& row : db.rows()) {
    RowSigs s{doi_signature(row.citation_value("DOI")),
              title_year_signature(row.citation_value("Title"), row.citation_value("Publication Year"))};
    if (!s.doi.empty()) db_owners[s.doi].push_back(row.key);
    if (!s.title_year.empty()) db_owners[s.title_year].push_back(row.key);
    sigs.push_back(std::move(s));
  }

  RelinkReport report;
  std::set<std::string> reported;
  auto report_ambiguous = [&](const std::string& sig, std::vector<std::string> keys) {
    if (reported.insert(sig).second) report.ambiguous.push_back({sig, std::move(keys)});
  };

  std::vector<std::optional<RelinkPair>> match(db.size());
  std::unordered_set<std::string> claimed;

  auto attempt = [&](std::size_t r, const std::string& sig, MatchedBy by) {
    if (sig.empty() || match[r]) return;
    if (auto amb = index.ambiguous.find(sig); amb != index.ambiguous.end()) {
      report_ambiguous(sig, amb->second);
      return;
    }
    if (db_owners[sig].size() > 1) {
      report_ambiguous(sig, db_owners[sig]);
      return;
    }
    auto hit = index.signature_to_key.find(sig);
    if (hit == index.signature_to_key.end()) return;
    if (claimed.count(hit->second)) {
      report_ambiguous(sig, {hit->second, db.rows()[r].key});
      return;
    }
    claimed.insert(hit->second);
    match[r] = RelinkPair{db.rows()[r].key, hit->second, by};
  };

  for (std::size_t r = 0; r < db.size(); ++r) attempt(r, sigs[r].doi, MatchedBy::Doi);
  for (std::size_t r = 0; r < db.size(); ++r) attempt(r, sigs[r].title_year, MatchedBy::TitleYear);

  RelinkResult result{TagDatabase(db.schema()), {}};
  for (std::size_t r = 0; r < db.size(); ++r) {
    DatabaseRow row = db.rows()[r];
    if (match[r]) {
      row.key = match[r]->new_key;
      row.set_citation(*records.at(match[r]->new_key));
      report.matched.push_back(*match[r]);
    } else {
      report.unmatched_rows.push_back(row.key);
    }
    if (result.db.contains(row.key)) {
      throw Error(ErrorCode::DuplicateKey, row.key + " would appear twice after relinking");
    }
    result.db.append(std::move(row));
  }
  for (const auto& rec : exp.records) {
    if (!claimed.count(rec.key)) report.unmatched_records.push_back(rec.key);
  }
  result.report = std::move(report);
  return result;
}

}  // namespace littag
