#include "littag/database.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "littag/error.hpp"

namespace littag {

// ---------------------------------------------------------------------------
// DatabaseRow / TagDatabase
// ---------------------------------------------------------------------------

namespace {

std::optional<std::size_t> citation_slot(std::string_view column) noexcept {
  for (std::size_t i = 1; i < kCarriedColumns.size(); ++i) {
    if (kCarriedColumns[i] == column) return i - 1;
  }
  return std::nullopt;
}

void check_collisions(const CategoriesSchema& schema) {
  for (const auto* tag : schema.tags()) {
    if (is_carried_column(tag->name)) throw Error(ErrorCode::ColumnNameCollision, tag->name);
  }
}

}  // namespace

std::string_view DatabaseRow::citation_value(std::string_view column) const noexcept {
  if (column == "Key") return key;
  if (auto slot = citation_slot(column)) return citation[*slot];
  return {};
}

void DatabaseRow::set_citation(const CitationRecord& rec) {
  for (std::size_t i = 1; i < kCarriedColumns.size(); ++i) citation[i - 1] = std::string(rec.carried(kCarriedColumns[i]));
}

TagDatabase::TagDatabase(CategoriesSchema schema) : schema_(std::move(schema)) {
  for (const auto* tag : schema_.columns()) columns_.push_back(*tag);
}

std::optional<std::size_t> TagDatabase::tag_index(std::string_view name) const noexcept {
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i].name == name) return i;
  }
  return std::nullopt;
}

std::vector<std::string> TagDatabase::header() const {
  std::vector<std::string> out(kCarriedColumns.begin(), kCarriedColumns.end());
  for (const auto& tag : columns_) out.push_back(tag.name);
  return out;
}

const DatabaseRow* TagDatabase::find(std::string_view key) const {
  auto idx = row_index(key);
  return idx ? &rows_[*idx] : nullptr;
}

std::optional<std::size_t> TagDatabase::row_index(std::string_view key) const {
  auto it = index_.find(std::string(key));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::string TagDatabase::cell_text(const DatabaseRow& row, std::string_view column) const {
  if (column == "Key" || citation_slot(column)) return std::string(row.citation_value(column));
  if (auto idx = tag_index(column)) return serialize_cell(row.cells[*idx]);
  throw Error(ErrorCode::UnknownColumn, std::string(column));
}

void TagDatabase::append(DatabaseRow row) {
  if (row.key.empty()) throw Error(ErrorCode::EmptyKey, "row " + std::to_string(rows_.size() + 1));
  row.cells.resize(columns_.size(), EmptyCell{});
  auto [it, inserted] = index_.emplace(row.key, rows_.size());
  if (!inserted) throw Error(ErrorCode::DuplicateKey, row.key);
  rows_.push_back(std::move(row));
}

void TagDatabase::remove_rows(const std::vector<std::string>& keys) {
  std::set<std::string_view> doomed(keys.begin(), keys.end());
  rows_.erase(std::remove_if(rows_.begin(), rows_.end(), [&](const DatabaseRow& r) { return doomed.count(r.key) > 0; }),
              rows_.end());
  reindex();
}

void TagDatabase::rekey(std::size_t row, std::string new_key) {
  auto& target = rows_.at(row);
  if (target.key == new_key) return;
  if (new_key.empty()) throw Error(ErrorCode::EmptyKey, "rekey of " + target.key);
  if (index_.count(new_key)) throw Error(ErrorCode::DuplicateKey, new_key);
  index_.erase(target.key);
  index_.emplace(new_key, row);
  target.key = std::move(new_key);
}

void TagDatabase::replace_schema_same_layout(CategoriesSchema schema) {
  std::vector<TagDefinition> columns;
  for (const auto* tag : schema.columns()) columns.push_back(*tag);
  if (columns.size() != columns_.size()) throw Error(ErrorCode::ColumnSetMismatch, "schema layout changed");
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].name != columns_[i].name) throw Error(ErrorCode::ColumnSetMismatch, "schema layout changed");
  }
  schema_ = std::move(schema);
  columns_ = std::move(columns);
}

void TagDatabase::validate() const {
  std::set<std::string_view> keys;
  for (const auto& row : rows_) {
    if (row.key.empty()) throw Error(ErrorCode::EmptyKey, "validation");
    if (!keys.insert(row.key).second) throw Error(ErrorCode::DuplicateKey, row.key);
    if (row.cells.size() != columns_.size()) throw Error(ErrorCode::InvalidCell, row.key + ": wrong cell count");
    for (std::size_t i = 0; i < columns_.size(); ++i) {
      try {
        if (canonical_cell(columns_[i], row.cells[i]) != row.cells[i]) {
          throw Error(ErrorCode::InvalidCell, "not canonical");
        }
      } catch (const Error& e) {
        throw Error(ErrorCode::InvalidCell, row.key + "/" + columns_[i].name + ": " + e.what());
      }
    }
  }
}

void TagDatabase::reindex() {
  index_.clear();
  for (std::size_t i = 0; i < rows_.size(); ++i) index_.emplace(rows_[i].key, i);
}

TagDatabase create_database(const ZoteroExport& exp, const CategoriesSchema& schema) {
  check_collisions(schema);
  TagDatabase db(schema);
  for (const auto& rec : exp.records) {
    DatabaseRow row;
    row.key = rec.key;
    row.set_citation(rec);
    db.append(std::move(row));
  }
  return db;
}

// ---------------------------------------------------------------------------
// Persistence
// ---------------------------------------------------------------------------

std::string serialize_database(const TagDatabase& db) {
  std::string out;
  csv::append_row(out, db.header());
  csv::Row fields;
  for (const auto& row : db.rows()) {
    fields.clear();
    fields.push_back(row.key);
    fields.insert(fields.end(), row.citation.begin(), row.citation.end());
    for (const auto& cell : row.cells) fields.push_back(serialize_cell(cell));
    csv::append_row(out, fields);
  }
  return out;
}

void check_base_name(std::string_view base) {
  if (base.empty() || base.find_first_of("/\\:\0", 0, 4) != std::string_view::npos || base == "." || base == "..") {
    throw Error(ErrorCode::InvalidBaseName, std::string(base));
  }
}

SavedDatabase save_database(const TagDatabase& db, std::string_view base, UtcInstant at) {
  check_base_name(base);
  return {versioned_filename(base, at), serialize_database(db)};
}

std::string_view to_string(InvalidCellPolicy policy) noexcept {
  return policy == InvalidCellPolicy::Strict ? "strict" : "quarantine";
}

namespace {

// Shared by load and conform: sources supply serialized text per (row, tag).
struct CellSink {
  InvalidCellPolicy policy;
  ConformReport& report;

  CellValue accept(const TagDefinition& tag, const std::string& key, std::string_view text) {
    if (auto parsed = parse_cell(tag, text)) return std::move(*parsed);
    if (policy == InvalidCellPolicy::Strict) {
      throw Error(ErrorCode::InvalidCell, key + "/" + tag.name + ": '" + std::string(text) + "'");
    }
    report.invalidated.push_back({key, tag.name, std::string(text)});
    return EmptyCell{};
  }
};

}  // namespace

LoadResult load_database(std::string_view csv_bytes, const CategoriesSchema& schema, InvalidCellPolicy policy) {
  check_collisions(schema);
  auto rows = csv::parse(csv_bytes);
  if (rows.empty()) throw Error(ErrorCode::MissingKeyColumn, "empty file");
  const auto& header = rows.front();

  std::map<std::string, std::size_t> position;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (!position.emplace(header[c], c).second) throw Error(ErrorCode::MalformedCsv, "duplicate column " + header[c]);
  }
  auto key_col = position.find("Key");
  if (key_col == position.end()) throw Error(ErrorCode::MissingKeyColumn, "");

  LoadResult result{TagDatabase(schema), {}};
  result.report.policy = policy;
  const auto& columns = result.db.tag_columns();

  std::vector<std::optional<std::size_t>> tag_source(columns.size());
  for (std::size_t t = 0; t < columns.size(); ++t) {
    auto it = position.find(columns[t].name);
    if (it != position.end()) {
      tag_source[t] = it->second;
    } else {
      result.report.tags_added.push_back(columns[t].name);
    }
  }
  std::vector<std::pair<std::size_t, RemovedTag>> extra_columns;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (is_carried_column(header[c]) || schema.find(header[c])) continue;
    extra_columns.push_back({c, RemovedTag{header[c], 0}});
  }

  CellSink sink{policy, result.report};
  for (std::size_t r = 1; r < rows.size(); ++r) {
    auto& fields = rows[r];
    if (csv::is_blank(fields)) continue;
    if (fields.size() > header.size()) {
      throw Error(ErrorCode::MalformedCsv, "record " + std::to_string(r + 1) + " has more fields than the header");
    }
    fields.resize(header.size());
    DatabaseRow row;
    row.key = fields[key_col->second];
    if (row.key.empty()) throw Error(ErrorCode::EmptyKey, "record " + std::to_string(r + 1));
    if (result.db.contains(row.key)) throw Error(ErrorCode::DuplicateKey, row.key);
    for (std::size_t i = 1; i < kCarriedColumns.size(); ++i) {
      auto it = position.find(std::string(kCarriedColumns[i]));
      if (it != position.end()) row.citation[i - 1] = fields[it->second];
    }
    row.cells.reserve(columns.size());
    for (std::size_t t = 0; t < columns.size(); ++t) {
      row.cells.push_back(tag_source[t] ? sink.accept(columns[t], row.key, fields[*tag_source[t]])
                                        : CellValue{EmptyCell{}});
    }
    for (auto& [c, removed] : extra_columns) {
      if (!fields[c].empty()) ++removed.dropped_cells;
    }
    result.db.append(std::move(row));
  }
  for (auto& [c, removed] : extra_columns) result.report.tags_removed.push_back(std::move(removed));
  return result;
}

LoadResult conform(const TagDatabase& db, const CategoriesSchema& schema, InvalidCellPolicy policy) {
  check_collisions(schema);
  LoadResult result{TagDatabase(schema), {}};
  result.report.policy = policy;
  result.report.schema_delta = schema_diff(db.schema(), schema);
  const auto& columns = result.db.tag_columns();

  std::vector<std::optional<std::size_t>> source(columns.size());
  for (std::size_t t = 0; t < columns.size(); ++t) {
    source[t] = db.tag_index(columns[t].name);
    if (!source[t]) result.report.tags_added.push_back(columns[t].name);
  }
  std::vector<std::pair<std::size_t, RemovedTag>> removed;
  for (std::size_t t = 0; t < db.tag_columns().size(); ++t) {
    if (!schema.find(db.tag_columns()[t].name)) removed.push_back({t, RemovedTag{db.tag_columns()[t].name, 0}});
  }

  CellSink sink{policy, result.report};
  for (const auto& old_row : db.rows()) {
    DatabaseRow row;
    row.key = old_row.key;
    row.citation = old_row.citation;
    row.cells.reserve(columns.size());
    for (std::size_t t = 0; t < columns.size(); ++t) {
      if (!source[t]) {
        row.cells.emplace_back(EmptyCell{});
        continue;
      }
      const auto& old_cell = old_row.cells[*source[t]];
      if (db.tag_columns()[*source[t]] == columns[t]) {
        row.cells.push_back(old_cell);
      } else {
        row.cells.push_back(sink.accept(columns[t], row.key, serialize_cell(old_cell)));
      }
    }
    for (auto& [t, r] : removed) {
      if (!is_empty(old_row.cells[t])) ++r.dropped_cells;
    }
    result.db.append(std::move(row));
  }
  for (auto& [t, r] : removed) result.report.tags_removed.push_back(std::move(r));
  return result;
}

// ---------------------------------------------------------------------------
// KeyedTable
// ---------------------------------------------------------------------------

KeyedTable parse_keyed_table(std::string_view csv_bytes) {
  auto rows = csv::parse(csv_bytes);
  if (rows.empty()) throw Error(ErrorCode::MissingKeyColumn, "empty file");
  auto& header = rows.front();
  auto key_it = std::find(header.begin(), header.end(), "Key");
  if (key_it == header.end()) throw Error(ErrorCode::MissingKeyColumn, "");
  std::size_t key_col = static_cast<std::size_t>(key_it - header.begin());
  std::set<std::string> names;
  for (const auto& name : header) {
    if (!names.insert(name).second) throw Error(ErrorCode::MalformedCsv, "duplicate column " + name);
  }

  auto move_key_first = [key_col](csv::Row& row) {
    std::rotate(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(key_col),
                row.begin() + static_cast<std::ptrdiff_t>(key_col) + 1);
  };
  KeyedTable table;
  table.header = header;
  move_key_first(table.header);
  std::set<std::string> keys;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    auto& row = rows[r];
    if (csv::is_blank(row)) continue;
    if (row.size() > header.size()) {
      throw Error(ErrorCode::MalformedCsv, "record " + std::to_string(r + 1) + " has more fields than the header");
    }
    row.resize(header.size());
    move_key_first(row);
    if (row[0].empty()) throw Error(ErrorCode::EmptyKey, "record " + std::to_string(r + 1));
    if (!keys.insert(row[0]).second) throw Error(ErrorCode::DuplicateKey, row[0]);
    table.rows.push_back(std::move(row));
  }
  return table;
}

KeyedTable to_keyed_table(const TagDatabase& db) {
  KeyedTable table;
  table.header = db.header();
  table.rows.reserve(db.size());
  for (const auto& row : db.rows()) {
    csv::Row fields;
    fields.reserve(table.header.size());
    fields.push_back(row.key);
    fields.insert(fields.end(), row.citation.begin(), row.citation.end());
    for (const auto& cell : row.cells) fields.push_back(serialize_cell(cell));
    table.rows.push_back(std::move(fields));
  }
  return table;
}

std::string serialize_keyed_table(const KeyedTable& table) {
  std::string out;
  csv::append_row(out, table.header);
  for (const auto& row : table.rows) csv::append_row(out, row);
  return out;
}

}  // namespace littag
