#include "littag/json.hpp"

namespace littag::json {

namespace {

Json strings(const std::vector<std::string>& items) {
  Json out = Json::array();
  for (const auto& s : items) out.push_back(s);
  return out;
}

Json tag_definition(const TagDefinition& t) {
  Json out;
  out["name"] = t.name;
  out["kind"] = to_string(t.kind);
  out["group"] = t.group;
  out["options"] = strings(t.options);
  return out;
}

Json tag_options(const std::vector<TagOption>& items) {
  Json out = Json::array();
  for (const auto& o : items) out.push_back({{"tag", o.tag}, {"option", o.option}});
  return out;
}

}  // namespace

std::string dump(const Json& value) { return value.dump(2, ' ', false, Json::error_handler_t::replace) + "\n"; }

Json error_body(const Error& e) {
  Json out;
  out["error"] = e.name();
  out["detail"] = e.detail();
  if (const auto* parse = dynamic_cast<const FilterParseError*>(&e)) {
    out["position"] = parse->position();
    out["expected"] = strings(parse->expected());
  }
  return out;
}

Json schema(const CategoriesSchema& s) {
  Json groups = Json::array();
  for (const auto& g : s.groups()) {
    Json tags = Json::array();
    for (const auto& t : g.tags) tags.push_back(tag_definition(t));
    groups.push_back({{"name", g.name}, {"tags", std::move(tags)}});
  }
  Json out;
  out["fingerprint"] = s.fingerprint();
  out["groups"] = std::move(groups);
  return out;
}

Json schema_delta(const SchemaDelta& d) {
  Json out;
  Json added = Json::array();
  for (const auto& t : d.added_tags) added.push_back(tag_definition(t));
  Json removed = Json::array();
  for (const auto& t : d.removed_tags) removed.push_back(tag_definition(t));
  Json kinds = Json::array();
  for (const auto& k : d.kind_changed) kinds.push_back({{"tag", k.tag}, {"from", to_string(k.from)}, {"to", to_string(k.to)}});
  Json regrouped = Json::array();
  for (const auto& g : d.regrouped) regrouped.push_back({{"tag", g.tag}, {"from", g.from}, {"to", g.to}});
  out["added_tags"] = std::move(added);
  out["removed_tags"] = std::move(removed);
  out["kind_changed"] = std::move(kinds);
  out["regrouped"] = std::move(regrouped);
  out["added_options"] = tag_options(d.added_options);
  out["removed_options"] = tag_options(d.removed_options);
  return out;
}

Json row(const TagDatabase& db, const DatabaseRow& r) {
  Json out = Json::object();
  for (const auto& column : db.header()) out[column] = db.cell_text(r, column);
  return out;
}

Json rows(const TagDatabase& db, const std::vector<std::size_t>& indices) {
  Json out = Json::array();
  for (auto i : indices) out.push_back(row(db, db.rows()[i]));
  return out;
}

Json option_counts(const OptionCounts& c) {
  Json tags = Json::array();
  for (const auto& t : c.tags) {
    Json counts = Json::object();
    for (const auto& e : t.entries) counts[e.label] = e.count;
    tags.push_back({{"tag", t.tag}, {"kind", to_string(t.kind)}, {"counts", std::move(counts)}});
  }
  Json out;
  out["rows"] = c.rows;
  out["tags"] = std::move(tags);
  return out;
}

Json crosstab(const CrossTab& t) {
  Json matrix = Json::object();
  Json counts = Json::array();
  for (std::size_t r = 0; r < t.row_labels.size(); ++r) {
    Json line = Json::object();
    for (std::size_t c = 0; c < t.col_labels.size(); ++c) line[t.col_labels[c]] = t.counts[r][c];
    matrix[t.row_labels[r]] = std::move(line);
    counts.push_back(t.counts[r]);
  }
  Json out;
  out["rows"] = t.row_tag;
  out["cols"] = t.col_tag;
  out["row_labels"] = strings(t.row_labels);
  out["col_labels"] = strings(t.col_labels);
  out["counts"] = std::move(counts);
  out["matrix"] = std::move(matrix);
  out["filtered_rows"] = t.filtered_rows;
  return out;
}

Json sync_report(const SyncReport& r) {
  Json removed = Json::array();
  for (const auto& row : r.removed) removed.push_back(row.key);
  Json updated = Json::array();
  for (const auto& u : r.updated) {
    Json changes = Json::array();
    for (const auto& c : u.changes) changes.push_back({{"column", c.column}, {"old", c.old_value}, {"new", c.new_value}});
    updated.push_back({{"key", u.key}, {"changes", std::move(changes)}});
  }
  Json out;
  out["added"] = strings(r.added);
  out["removed"] = std::move(removed);
  out["updated"] = std::move(updated);
  return out;
}

Json conform_report(const ConformReport& r) {
  Json removed = Json::array();
  for (const auto& t : r.tags_removed) removed.push_back({{"tag", t.name}, {"dropped_cells", t.dropped_cells}});
  Json invalidated = Json::array();
  for (const auto& c : r.invalidated) invalidated.push_back({{"key", c.key}, {"tag", c.tag}, {"value", c.value}});
  Json out;
  out["policy"] = to_string(r.policy);
  out["tags_added"] = strings(r.tags_added);
  out["tags_removed"] = std::move(removed);
  out["invalidated"] = std::move(invalidated);
  out["schema_delta"] = schema_delta(r.schema_delta);
  return out;
}

Json diff_report(const DiffReport& r) {
  Json changed = Json::array();
  for (const auto& c : r.changed) changed.push_back({{"key", c.key}, {"column", c.column}, {"a", c.value_a}, {"b", c.value_b}});
  Json out;
  out["only_in_a"] = strings(r.only_in_a);
  out["only_in_b"] = strings(r.only_in_b);
  out["changed"] = std::move(changed);
  out["columns_only_in_a"] = strings(r.columns_only_in_a);
  out["columns_only_in_b"] = strings(r.columns_only_in_b);
  return out;
}

Json merge_report(const MergeReport& r) {
  Json duplicates = Json::array();
  for (const auto& d : r.duplicates) {
    duplicates.push_back({{"key", d.key}, {"sources", d.sources}, {"winner", d.winner}, {"identical", d.identical}});
  }
  Json out;
  out["policy"] = to_string(r.policy);
  out["source_rows"] = r.source_rows;
  out["output_rows"] = r.output_rows;
  out["duplicates"] = std::move(duplicates);
  return out;
}

Json relink_report(const RelinkReport& r) {
  Json matched = Json::array();
  for (const auto& m : r.matched) matched.push_back({{"old_key", m.old_key}, {"new_key", m.new_key}, {"by", to_string(m.by)}});
  Json ambiguous = Json::array();
  for (const auto& a : r.ambiguous) ambiguous.push_back({{"signature", a.signature}, {"keys", strings(a.keys)}});
  Json out;
  out["matched"] = std::move(matched);
  out["unmatched_rows"] = strings(r.unmatched_rows);
  out["unmatched_records"] = strings(r.unmatched_records);
  out["ambiguous"] = std::move(ambiguous);
  return out;
}

Json replace_result(const ReplaceResult& r) {
  Json out;
  out["cells_changed"] = r.cells_changed;
  out["merged"] = r.merged;
  out["schema_delta"] = schema_delta(r.delta);
  return out;
}

}  // namespace littag::json
