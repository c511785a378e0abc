#include "littag/tagging.hpp"

#include <algorithm>

#include "littag/error.hpp"
#include "littag/text.hpp"

namespace littag {

namespace {

struct CellRef {
  std::size_t row;
  std::size_t tag;
};

std::size_t require_tag(const TagDatabase& db, std::string_view tag) {
  auto idx = db.tag_index(tag);
  if (!idx) throw Error(ErrorCode::UnknownTag, std::string(tag));
  return *idx;
}

CellRef locate(const TagDatabase& db, std::string_view key, std::string_view tag) {
  auto row = db.row_index(key);
  if (!row) throw Error(ErrorCode::UnknownKey, std::string(key));
  return {*row, require_tag(db, tag)};
}

bool valid_option_text(std::string_view option) {
  return !option.empty() && text::trim(option).size() == option.size() &&
         option.find_first_of(";\r\n") == std::string_view::npos && option != kNoneLabel;
}

}  // namespace

TagDatabase assign(const TagDatabase& db, std::string_view key, std::string_view tag, CellValue value) {
  auto ref = locate(db, key, tag);
  auto canonical = canonical_cell(db.tag_columns()[ref.tag], std::move(value));
  TagDatabase out = db;
  out.set_cell(ref.row, ref.tag, std::move(canonical));
  return out;
}

TagDatabase assign_text(const TagDatabase& db, std::string_view key, std::string_view tag, std::string_view value) {
  auto ref = locate(db, key, tag);
  const auto& def = db.tag_columns()[ref.tag];
  auto parsed = parse_cell(def, value);
  if (!parsed) {
    if (def.kind == TagKind::Single) throw Error(ErrorCode::UnknownOption, def.name + ": '" + std::string(value) + "'");
    if (def.kind == TagKind::Multi) {
      for (const auto& part : text::split(value, ';')) {
        auto member = text::trim(part);
        if (!member.empty() && !def.has_option(member)) {
          throw Error(ErrorCode::UnknownOption, def.name + ": '" + std::string(member) + "'");
        }
      }
    }
    throw Error(ErrorCode::InvalidCell, def.name + ": '" + std::string(value) + "' is not a YYYY-MM-DD date");
  }
  TagDatabase out = db;
  out.set_cell(ref.row, ref.tag, std::move(*parsed));
  return out;
}

TagDatabase toggle_option(const TagDatabase& db, std::string_view key, std::string_view tag, std::string_view option) {
  auto ref = locate(db, key, tag);
  const auto& def = db.tag_columns()[ref.tag];
  if (def.kind != TagKind::Multi) {
    throw Error(ErrorCode::KindMismatch, def.name + " is " + std::string(to_string(def.kind)) + ", toggle needs multi");
  }
  if (!def.has_option(option)) throw Error(ErrorCode::UnknownOption, def.name + ": '" + std::string(option) + "'");

  std::vector<std::string> members;
  if (auto* current = std::get_if<MultiOptions>(&db.rows()[ref.row].cells[ref.tag])) members = current->options;
  auto it = std::find(members.begin(), members.end(), option);
  if (it != members.end()) {
    members.erase(it);
  } else {
    members.emplace_back(option);
  }
  TagDatabase out = db;
  out.set_cell(ref.row, ref.tag, canonical_cell(def, MultiOptions{std::move(members)}));
  return out;
}

TagDatabase clear(const TagDatabase& db, std::string_view key, std::string_view tag) {
  auto ref = locate(db, key, tag);
  TagDatabase out = db;
  out.set_cell(ref.row, ref.tag, EmptyCell{});
  return out;
}

TagDatabase delete_tag_data(const TagDatabase& db, std::string_view tag) {
  auto t = require_tag(db, tag);
  TagDatabase out = db;
  for (std::size_t r = 0; r < out.size(); ++r) out.set_cell(r, t, EmptyCell{});
  return out;
}

std::size_t TagCounts::count(std::string_view label) const noexcept {
  for (const auto& e : entries) {
    if (e.label == label) return e.count;
  }
  return 0;
}

const TagCounts* OptionCounts::find(std::string_view tag) const noexcept {
  for (const auto& t : tags) {
    if (t.tag == tag) return &t;
  }
  return nullptr;
}

OptionCounts option_counts(const TagDatabase& db, const std::optional<std::vector<std::string>>& keys) {
  std::vector<std::size_t> selected;
  if (keys) {
    selected.reserve(keys->size());
    for (const auto& key : *keys) {
      auto idx = db.row_index(key);
      if (!idx) throw Error(ErrorCode::UnknownKey, key);
      selected.push_back(*idx);
    }
  } else {
    selected.resize(db.size());
    for (std::size_t i = 0; i < selected.size(); ++i) selected[i] = i;
  }

  OptionCounts out;
  out.rows = selected.size();
  for (const auto* def : db.schema().tags()) {
    auto t = *db.tag_index(def->name);
    TagCounts counts{def->name, def->kind, {}};
    std::size_t none = 0;
    if (is_selection(def->kind)) {
      std::vector<std::size_t> tally(def->options.size(), 0);
      for (auto r : selected) {
        const auto& cell = db.rows()[r].cells[t];
        if (is_empty(cell)) {
          ++none;
          continue;
        }
        for (auto option : cell_options(cell)) {
          if (auto idx = def->option_index(option)) ++tally[*idx];
        }
      }
      for (std::size_t i = 0; i < def->options.size(); ++i) counts.entries.push_back({def->options[i], tally[i]});
    } else {
      std::size_t filled = 0;
      for (auto r : selected) {
        if (is_empty(db.rows()[r].cells[t])) {
          ++none;
        } else {
          ++filled;
        }
      }
      counts.entries.push_back({std::string(kNonEmptyLabel), filled});
    }
    counts.entries.push_back({std::string(kNoneLabel), none});
    out.tags.push_back(std::move(counts));
  }
  return out;
}

ReplaceResult replace_option(const TagDatabase& db, std::string_view tag, std::string_view old_option,
                             std::string_view new_option) {
  auto t = require_tag(db, tag);
  const auto& def = db.tag_columns()[t];
  if (!is_selection(def.kind)) {
    throw Error(ErrorCode::KindMismatch, def.name + " is " + std::string(to_string(def.kind)) + ", not a selection tag");
  }
  if (!def.has_option(old_option)) throw Error(ErrorCode::UnknownOption, def.name + ": '" + std::string(old_option) + "'");
  if (!valid_option_text(new_option)) {
    throw Error(ErrorCode::InvalidOption, def.name + ": '" + std::string(new_option) + "'");
  }

  ReplaceResult result{db, 0, false, {}};
  if (old_option == new_option) return result;

  // Rewrite the definition: rename in place, or drop the old option when
  // the new one already exists.
  std::vector<TagGroup> groups = db.schema().groups();
  TagDefinition* target = nullptr;
  for (auto& group : groups) {
    for (auto& candidate : group.tags) {
      if (candidate.name == def.name) target = &candidate;
    }
  }
  auto& opts = target->options;
  auto old_it = std::find(opts.begin(), opts.end(), old_option);
  result.merged = target->has_option(new_option);
  result.delta.removed_options.push_back({def.name, std::string(old_option)});
  if (result.merged) {
    opts.erase(old_it);
  } else {
    *old_it = std::string(new_option);
    result.delta.added_options.push_back({def.name, std::string(new_option)});
  }
  TagDefinition updated = *target;
  result.db.replace_schema_same_layout(CategoriesSchema(std::move(groups)));

  for (std::size_t r = 0; r < result.db.size(); ++r) {
    const auto& cell = result.db.rows()[r].cells[t];
    if (auto* single = std::get_if<SingleOption>(&cell)) {
      if (single->option == old_option) {
        result.db.set_cell(r, t, SingleOption{std::string(new_option)});
        ++result.cells_changed;
      }
    } else if (auto* multi = std::get_if<MultiOptions>(&cell)) {
      if (std::find(multi->options.begin(), multi->options.end(), old_option) == multi->options.end()) continue;
      std::vector<std::string> members;
      for (const auto& m : multi->options) members.push_back(m == old_option ? std::string(new_option) : m);
      result.db.set_cell(r, t, canonical_cell(updated, MultiOptions{std::move(members)}));
      ++result.cells_changed;
    }
  }
  return result;
}

}  // namespace littag
