#include "littag/query.hpp"

#include <algorithm>
#include <unordered_map>

#include "littag/error.hpp"
#include "littag/text.hpp"

namespace littag {

namespace {

// Where a header column lives in a DatabaseRow.
struct ColumnRef {
  enum class Where { Key, Citation, Tag } where = Where::Key;
  std::size_t index = 0;
  const TagDefinition* tag = nullptr;
};

class Binder {
 public:
  explicit Binder(const TagDatabase& db) : db_(db) {}

  const ColumnRef& resolve(const std::string& name) {
    auto it = cache_.find(name);
    if (it != cache_.end()) return it->second;
    ColumnRef ref;
    if (name == "Key") {
      ref.where = ColumnRef::Where::Key;
    } else if (auto pos = std::find(kCarriedColumns.begin() + 1, kCarriedColumns.end(), name);
               pos != kCarriedColumns.end()) {
      ref.where = ColumnRef::Where::Citation;
      ref.index = static_cast<std::size_t>(pos - kCarriedColumns.begin()) - 1;
    } else if (auto idx = db_.tag_index(name)) {
      ref.where = ColumnRef::Where::Tag;
      ref.index = *idx;
      ref.tag = &db_.tag_columns()[*idx];
    } else {
      throw Error(ErrorCode::UnknownColumn, name);
    }
    return cache_.emplace(name, ref).first->second;
  }

  void bind(const FilterExpr& expr) {
    for (const auto& column : referenced_columns(expr)) resolve(column);
  }

 private:
  const TagDatabase& db_;
  std::unordered_map<std::string, ColumnRef> cache_;
};

class Evaluator {
 public:
  explicit Evaluator(Binder& binder) : binder_(binder) {}

  bool eval(const FilterExpr& e, const DatabaseRow& row) {
    if (auto* o = e.as<OrExpr>()) {
      return std::any_of(o->operands.begin(), o->operands.end(), [&](const FilterExpr& x) { return eval(x, row); });
    }
    if (auto* a = e.as<AndExpr>()) {
      return std::all_of(a->operands.begin(), a->operands.end(), [&](const FilterExpr& x) { return eval(x, row); });
    }
    if (auto* n = e.as<NotExpr>()) return !eval(*n->operand, row);
    if (auto* c = e.as<CompareExpr>()) return compare(*c, row);
    if (auto* h = e.as<HasExpr>()) {
      const auto& ref = binder_.resolve(h->column);
      if (ref.where == ColumnRef::Where::Tag) {
        const auto& cell = row.cells[ref.index];
        if (auto* multi = std::get_if<MultiOptions>(&cell)) {
          return std::find(multi->options.begin(), multi->options.end(), h->option) != multi->options.end();
        }
        if (is_empty(cell)) return false;
      }
      auto value = text_of(ref, row);
      return !value.empty() && value == h->option;
    }
    if (auto* k = e.as<ContainsExpr>()) {
      auto value = text_of(binder_.resolve(k->column), row);
      return !value.empty() && text::icontains(value, k->needle);
    }
    if (auto* m = e.as<EmptyExpr>()) return text_of(binder_.resolve(m->column), row).empty();
    if (auto* t = e.as<TaggedExpr>()) return !text_of(binder_.resolve(t->column), row).empty();
    return false;
  }

 private:
  std::string text_of(const ColumnRef& ref, const DatabaseRow& row) const {
    switch (ref.where) {
      case ColumnRef::Where::Key: return row.key;
      case ColumnRef::Where::Citation: return row.citation[ref.index];
      case ColumnRef::Where::Tag: return serialize_cell(row.cells[ref.index]);
    }
    return {};
  }

  bool compare(const CompareExpr& c, const DatabaseRow& row) {
    const auto& ref = binder_.resolve(c.column);
    auto value = text_of(ref, row);
    if (value.empty()) return false;
    const auto& lit = c.literal.text;

    int order = 0;
    double lhs = 0;
    double rhs = 0;
    bool numeric = text::parse_decimal(value, lhs) && text::parse_decimal(lit, rhs);
    if (c.op == CompareOp::Eq || c.op == CompareOp::Ne) {
      bool equal = (c.literal.kind == Literal::Kind::Number && numeric) ? lhs == rhs : value == lit;
      return (c.op == CompareOp::Eq) == equal;
    }
    if (numeric) {
      order = lhs < rhs ? -1 : (lhs > rhs ? 1 : 0);
    } else if (ref.tag != nullptr && ref.tag->kind == TagKind::Date && parse_date(lit)) {
      auto a = parse_date(value);
      auto b = parse_date(lit);
      if (!a) return false;
      order = *a < *b ? -1 : (*a > *b ? 1 : 0);
    } else {
      int cmp = value.compare(lit);
      order = cmp < 0 ? -1 : (cmp > 0 ? 1 : 0);
    }
    switch (c.op) {
      case CompareOp::Lt: return order < 0;
      case CompareOp::Le: return order <= 0;
      case CompareOp::Gt: return order > 0;
      case CompareOp::Ge: return order >= 0;
      default: return false;
    }
  }

  Binder& binder_;
};

std::vector<std::size_t> all_rows(const TagDatabase& db) {
  std::vector<std::size_t> out(db.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = i;
  return out;
}

std::vector<std::size_t> selected_rows(const TagDatabase& db, const std::optional<FilterExpr>& filter) {
  return filter ? filter_rows(db, *filter) : all_rows(db);
}

const TagDefinition& tabulable(const TagDatabase& db, std::string_view name) {
  auto idx = db.tag_index(name);
  if (!idx) throw Error(ErrorCode::UnknownTag, std::string(name));
  const auto& def = db.tag_columns()[*idx];
  if (!is_selection(def.kind)) {
    throw Error(ErrorCode::KindNotTabulable, def.name + " is " + std::string(to_string(def.kind)));
  }
  return def;
}

std::vector<std::string> labels_of(const TagDefinition& def) {
  auto labels = def.options;
  labels.emplace_back(kNoneLabel);
  return labels;
}

// Label positions a cell contributes to; the "(none)" slot when empty.
std::vector<std::size_t> label_slots(const TagDefinition& def, const CellValue& cell) {
  std::vector<std::size_t> slots;
  for (auto option : cell_options(cell)) {
    if (auto idx = def.option_index(option)) slots.push_back(*idx);
  }
  if (slots.empty()) slots.push_back(def.options.size());
  return slots;
}

}  // namespace

void bind_filter(const TagDatabase& db, const FilterExpr& expr) {
  Binder binder(db);
  binder.bind(expr);
}

std::vector<std::size_t> filter_rows(const TagDatabase& db, const FilterExpr& expr) {
  Binder binder(db);
  binder.bind(expr);
  Evaluator evaluator(binder);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < db.size(); ++i) {
    if (evaluator.eval(expr, db.rows()[i])) out.push_back(i);
  }
  return out;
}

std::vector<std::string> eval_filter(const TagDatabase& db, const FilterExpr& expr) {
  std::vector<std::string> keys;
  for (auto i : filter_rows(db, expr)) keys.push_back(db.rows()[i].key);
  return keys;
}

std::size_t CrossTab::at(std::string_view row_label, std::string_view col_label) const {
  auto r = std::find(row_labels.begin(), row_labels.end(), row_label);
  auto c = std::find(col_labels.begin(), col_labels.end(), col_label);
  if (r == row_labels.end()) throw Error(ErrorCode::UnknownOption, row_tag + ": '" + std::string(row_label) + "'");
  if (c == col_labels.end()) throw Error(ErrorCode::UnknownOption, col_tag + ": '" + std::string(col_label) + "'");
  return counts[static_cast<std::size_t>(r - row_labels.begin())][static_cast<std::size_t>(c - col_labels.begin())];
}

std::size_t CrossTab::total() const noexcept {
  std::size_t sum = 0;
  for (const auto& row : counts) {
    for (auto n : row) sum += n;
  }
  return sum;
}

CrossTab crosstab(const TagDatabase& db, std::string_view row_tag, std::string_view col_tag,
                  const std::optional<FilterExpr>& filter) {
  const auto& row_def = tabulable(db, row_tag);
  const auto& col_def = tabulable(db, col_tag);
  auto r_idx = *db.tag_index(row_def.name);
  auto c_idx = *db.tag_index(col_def.name);

  CrossTab out;
  out.row_tag = row_def.name;
  out.col_tag = col_def.name;
  out.row_labels = labels_of(row_def);
  out.col_labels = labels_of(col_def);
  out.counts.assign(out.row_labels.size(), std::vector<std::size_t>(out.col_labels.size(), 0));

  auto rows = selected_rows(db, filter);
  out.filtered_rows = rows.size();
  for (auto i : rows) {
    const auto& row = db.rows()[i];
    auto rs = label_slots(row_def, row.cells[r_idx]);
    auto cs = label_slots(col_def, row.cells[c_idx]);
    for (auto r : rs) {
      for (auto c : cs) ++out.counts[r][c];
    }
  }
  return out;
}

std::string export_table(const TagDatabase& db, const std::vector<std::string>& columns,
                         const std::optional<FilterExpr>& filter) {
  Binder binder(db);
  std::vector<std::string> header{"Key"};
  for (const auto& column : columns) {
    binder.resolve(column);
    if (column != "Key") header.push_back(column);
  }
  auto rows = selected_rows(db, filter);

  std::string out;
  csv::append_row(out, header);
  csv::Row line;
  for (auto i : rows) {
    const auto& row = db.rows()[i];
    line.clear();
    for (const auto& column : header) line.push_back(db.cell_text(row, column));
    csv::append_row(out, line);
  }
  return out;
}

}  // namespace littag
