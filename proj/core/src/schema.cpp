#include "littag/schema.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "littag/citations.hpp"
#include "littag/csv.hpp"
#include "littag/error.hpp"
#include "littag/text.hpp"
#include "littag/workbook.hpp"

namespace littag {

namespace fs = std::filesystem;

std::string_view to_string(TagKind kind) noexcept {
  switch (kind) {
    case TagKind::Single: return "single";
    case TagKind::Multi: return "multi";
    case TagKind::Date: return "date";
    case TagKind::Text: return "text";
    case TagKind::Note: return "note";
  }
  return "text";
}

std::optional<TagKind> parse_tag_kind(std::string_view keyword) noexcept {
  static constexpr std::pair<std::string_view, TagKind> aliases[] = {
      {"single", TagKind::Single},          {"single selection", TagKind::Single},
      {"multi", TagKind::Multi},            {"multi-selection", TagKind::Multi},
      {"multi selection", TagKind::Multi},  {"date", TagKind::Date},
      {"text", TagKind::Text},              {"text field", TagKind::Text},
      {"note", TagKind::Note},              {"notes", TagKind::Note},
  };
  keyword = text::trim(keyword);
  for (const auto& [alias, kind] : aliases) {
    if (text::iequals(alias, keyword)) return kind;
  }
  return std::nullopt;
}

std::optional<std::size_t> TagDefinition::option_index(std::string_view option) const noexcept {
  for (std::size_t i = 0; i < options.size(); ++i) {
    if (options[i] == option) return i;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// CategoriesSchema
// ---------------------------------------------------------------------------

namespace {

std::vector<GroupTable> render_tables(const std::vector<TagGroup>& groups) {
  std::vector<GroupTable> out;
  for (const auto& group : groups) {
    std::size_t depth = 0;
    for (const auto& tag : group.tags) depth = std::max(depth, tag.options.size());
    std::vector<csv::Row> rows(2 + depth, csv::Row(group.tags.size()));
    for (std::size_t c = 0; c < group.tags.size(); ++c) {
      const auto& tag = group.tags[c];
      rows[0][c] = tag.name;
      rows[1][c] = std::string(to_string(tag.kind));
      for (std::size_t r = 0; r < tag.options.size(); ++r) rows[2 + r][c] = tag.options[r];
    }
    out.push_back({group.name, csv::write(rows)});
  }
  return out;
}

std::string compute_fingerprint(const std::vector<TagGroup>& groups) {
  std::string canonical;
  for (const auto& table : render_tables(groups)) {
    canonical += table.group;
    canonical += '\n';
    canonical += table.csv_bytes;
    canonical += '\x1e';
  }
  return text::fnv1a_hex(canonical);
}

void check_option(const TagDefinition& tag, const std::string& option) {
  if (option.empty() || text::trim(option).size() != option.size() || option.find_first_of("\r\n") != std::string::npos) {
    throw Error(ErrorCode::InvalidOption, tag.name + ": '" + option + "'");
  }
  if (option.find(';') != std::string::npos) {
    throw Error(ErrorCode::OptionContainsSeparator, tag.name + ": '" + option + "'");
  }
  if (option == kNoneLabel) throw Error(ErrorCode::ReservedOptionName, tag.name + ": '" + option + "'");
}

void check_groups(const std::vector<TagGroup>& groups) {
  std::set<std::string> group_names;
  std::set<std::string> tag_names;
  std::size_t total = 0;
  for (const auto& group : groups) {
    if (group.name.empty() || group.name.find_first_of("/\\\r\n") != std::string::npos) {
      throw Error(ErrorCode::InvalidTagName, "invalid group name '" + group.name + "'");
    }
    if (!group_names.insert(group.name).second) throw Error(ErrorCode::DuplicateGroupName, group.name);
    if (group.tags.empty()) throw Error(ErrorCode::EmptyGroup, group.name);
    for (const auto& tag : group.tags) {
      ++total;
      if (text::trim(tag.name).empty()) throw Error(ErrorCode::EmptyTagName, "in group " + group.name);
      if (tag.name.find_first_of("\r\n") != std::string::npos || text::trim(tag.name).size() != tag.name.size()) {
        throw Error(ErrorCode::InvalidTagName, tag.name);
      }
      if (!tag_names.insert(tag.name).second) throw Error(ErrorCode::DuplicateTagName, tag.name);
      if (is_carried_column(tag.name)) throw Error(ErrorCode::ColumnNameCollision, tag.name);
      if (is_selection(tag.kind)) {
        if (tag.options.empty()) throw Error(ErrorCode::MissingOptions, tag.name);
        std::set<std::string_view> seen;
        for (const auto& option : tag.options) {
          check_option(tag, option);
          if (!seen.insert(option).second) throw Error(ErrorCode::DuplicateOption, tag.name + ": '" + option + "'");
        }
      } else if (!tag.options.empty()) {
        throw Error(ErrorCode::NonBlankOptionRow, tag.name);
      }
    }
  }
  if (total == 0) throw Error(ErrorCode::EmptySchema, "the categories define no tags");
}

}  // namespace

CategoriesSchema::CategoriesSchema(std::vector<TagGroup> groups) : groups_(std::move(groups)) {
  for (auto& group : groups_) {
    for (auto& tag : group.tags) tag.group = group.name;
  }
  check_groups(groups_);
  fingerprint_ = compute_fingerprint(groups_);
}

CategoriesSchema CategoriesSchema::unchecked(std::vector<TagGroup> groups) {
  CategoriesSchema schema;
  for (auto& group : groups) {
    for (auto& tag : group.tags) tag.group = group.name;
  }
  schema.groups_ = std::move(groups);
  schema.fingerprint_ = compute_fingerprint(schema.groups_);
  return schema;
}

void CategoriesSchema::validate() const { check_groups(groups_); }

std::vector<const TagDefinition*> CategoriesSchema::tags() const {
  std::vector<const TagDefinition*> out;
  for (const auto& group : groups_) {
    for (const auto& tag : group.tags) out.push_back(&tag);
  }
  return out;
}

std::vector<const TagDefinition*> CategoriesSchema::columns() const {
  auto all = tags();
  std::stable_partition(all.begin(), all.end(), [](const TagDefinition* t) { return t->kind != TagKind::Note; });
  return all;
}

const TagDefinition* CategoriesSchema::find(std::string_view name) const noexcept {
  for (const auto& group : groups_) {
    for (const auto& tag : group.tags) {
      if (tag.name == name) return &tag;
    }
  }
  return nullptr;
}

std::size_t CategoriesSchema::tag_count() const noexcept {
  std::size_t n = 0;
  for (const auto& group : groups_) n += group.tags.size();
  return n;
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

CategoriesSchema parse_categories_grids(
    const std::vector<std::pair<std::string, std::vector<std::vector<std::string>>>>& grids) {
  std::vector<TagGroup> groups;
  for (const auto& [group_name, rows] : grids) {
    TagGroup group{group_name, {}};
    std::size_t width = 0;
    for (const auto& row : rows) width = std::max(width, row.size());
    auto cell = [&](std::size_t r, std::size_t c) -> std::string_view {
      if (r >= rows.size() || c >= rows[r].size()) return {};
      return text::trim(rows[r][c]);
    };

    for (std::size_t c = 0; c < width; ++c) {
      auto name = cell(0, c);
      auto keyword = cell(1, c);
      std::vector<std::string> options;
      for (std::size_t r = 2; r < rows.size(); ++r) {
        auto option = cell(r, c);
        if (!option.empty()) options.emplace_back(option);
      }
      if (name.empty() && keyword.empty() && options.empty()) continue;
      if (name.empty()) {
        throw Error(ErrorCode::EmptyTagName, "group " + group_name + ", column " + std::to_string(c + 1));
      }
      auto kind = parse_tag_kind(keyword);
      if (!kind) throw Error(ErrorCode::UnknownKindKeyword, "'" + std::string(keyword) + "' for tag " + std::string(name));
      TagDefinition tag{std::string(name), *kind, std::move(options), group_name};
      if (is_selection(tag.kind) && tag.options.empty()) throw Error(ErrorCode::MissingOptions, tag.name);
      if (!is_selection(tag.kind) && !tag.options.empty()) throw Error(ErrorCode::NonBlankOptionRow, tag.name);
      group.tags.push_back(std::move(tag));
    }
    groups.push_back(std::move(group));
  }
  return CategoriesSchema(std::move(groups));
}

CategoriesSchema parse_categories_tables(const std::vector<GroupTable>& tables) {
  std::vector<std::pair<std::string, std::vector<std::vector<std::string>>>> grids;
  grids.reserve(tables.size());
  for (const auto& table : tables) grids.emplace_back(table.group, csv::parse(table.csv_bytes));
  return parse_categories_grids(grids);
}

CategoriesSchema parse_categories_workbook(std::string_view xlsx_bytes) {
  std::vector<std::pair<std::string, std::vector<std::vector<std::string>>>> grids;
  for (auto& sheet : workbook::read_xlsx(xlsx_bytes)) grids.emplace_back(std::move(sheet.name), std::move(sheet.rows));
  return parse_categories_grids(grids);
}

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::StorageError, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

CategoriesSchema load_categories(const std::string& path) {
  fs::path p(path);
  std::error_code ec;
  if (fs::is_directory(p, ec)) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(p)) {
      if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<GroupTable> tables;
    for (const auto& file : files) tables.push_back({file.stem().string(), read_file(file)});
    return parse_categories_tables(tables);
  }
  if (!fs::exists(p, ec)) throw Error(ErrorCode::StorageError, "no such categories source: " + path);
  auto bytes = read_file(p);
  if (workbook::looks_like_zip(bytes)) return parse_categories_workbook(bytes);
  return parse_categories_tables({{p.stem().string(), std::move(bytes)}});
}

std::vector<GroupTable> to_group_tables(const CategoriesSchema& schema) { return render_tables(schema.groups()); }

void write_categories_dir(const CategoriesSchema& schema, const std::string& dir) {
  fs::create_directories(dir);
  for (const auto& table : to_group_tables(schema)) {
    std::ofstream out(fs::path(dir) / (table.group + ".csv"), std::ios::binary);
    out << table.csv_bytes;
    if (!out) throw Error(ErrorCode::StorageError, "cannot write categories table " + table.group);
  }
}

// ---------------------------------------------------------------------------
// Evolution
// ---------------------------------------------------------------------------

SchemaDelta schema_diff(const CategoriesSchema& from, const CategoriesSchema& to) {
  SchemaDelta delta;
  for (const auto* old_tag : from.tags()) {
    const auto* new_tag = to.find(old_tag->name);
    if (!new_tag) {
      delta.removed_tags.push_back(*old_tag);
      continue;
    }
    if (old_tag->kind != new_tag->kind) delta.kind_changed.push_back({old_tag->name, old_tag->kind, new_tag->kind});
    if (old_tag->group != new_tag->group) delta.regrouped.push_back({old_tag->name, old_tag->group, new_tag->group});
    for (const auto& option : old_tag->options) {
      if (!new_tag->has_option(option)) delta.removed_options.push_back({old_tag->name, option});
    }
    for (const auto& option : new_tag->options) {
      if (!old_tag->has_option(option)) delta.added_options.push_back({new_tag->name, option});
    }
  }
  for (const auto* new_tag : to.tags()) {
    if (!from.find(new_tag->name)) delta.added_tags.push_back(*new_tag);
  }
  return delta;
}

CategoriesSchema apply_delta(const CategoriesSchema& schema, const SchemaDelta& delta) {
  std::vector<TagGroup> groups = schema.groups();
  auto find_tag = [&](const std::string& name) -> TagDefinition* {
    for (auto& group : groups) {
      for (auto& tag : group.tags) {
        if (tag.name == name) return &tag;
      }
    }
    return nullptr;
  };
  auto group_named = [&](const std::string& name) -> TagGroup& {
    for (auto& group : groups) {
      if (group.name == name) return group;
    }
    groups.push_back(TagGroup{name, {}});
    return groups.back();
  };
  auto take_tag = [&](const std::string& name) {
    TagDefinition taken;
    for (auto& group : groups) {
      auto it = std::find_if(group.tags.begin(), group.tags.end(), [&](const TagDefinition& t) { return t.name == name; });
      if (it != group.tags.end()) {
        taken = std::move(*it);
        group.tags.erase(it);
        break;
      }
    }
    return taken;
  };

  for (const auto& tag : delta.removed_tags) take_tag(tag.name);
  for (const auto& change : delta.kind_changed) {
    if (auto* tag = find_tag(change.tag)) tag->kind = change.to;
  }
  for (const auto& change : delta.regrouped) {
    auto moved = take_tag(change.tag);
    moved.group = change.to;
    group_named(change.to).tags.push_back(std::move(moved));
  }
  for (const auto& removed : delta.removed_options) {
    if (auto* tag = find_tag(removed.tag)) {
      auto& opts = tag->options;
      opts.erase(std::remove(opts.begin(), opts.end(), removed.option), opts.end());
    }
  }
  for (const auto& added : delta.added_options) {
    if (auto* tag = find_tag(added.tag)) tag->options.push_back(added.option);
  }
  for (const auto& tag : delta.added_tags) group_named(tag.group).tags.push_back(tag);

  groups.erase(std::remove_if(groups.begin(), groups.end(), [](const TagGroup& g) { return g.tags.empty(); }),
               groups.end());
  return CategoriesSchema(std::move(groups));
}

bool same_membership(const CategoriesSchema& a, const CategoriesSchema& b) {
  using Shape = std::map<std::string, std::tuple<TagKind, std::string, std::set<std::string>>>;
  auto shape = [](const CategoriesSchema& s) {
    Shape out;
    for (const auto* tag : s.tags()) {
      out[tag->name] = {tag->kind, tag->group, std::set<std::string>(tag->options.begin(), tag->options.end())};
    }
    return out;
  };
  return shape(a) == shape(b);
}

}  // namespace littag
