#include "littag/cell.hpp"

#include <algorithm>
#include <cstdio>

#include "littag/error.hpp"
#include "littag/text.hpp"

namespace littag {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Members ordered by the tag's option list; false if any member is unknown.
bool order_members(const TagDefinition& tag, std::vector<std::string>& members) {
  std::vector<bool> present(tag.options.size(), false);
  for (const auto& m : members) {
    auto idx = tag.option_index(m);
    if (!idx) return false;
    present[*idx] = true;
  }
  members.clear();
  for (std::size_t i = 0; i < tag.options.size(); ++i) {
    if (present[i]) members.push_back(tag.options[i]);
  }
  return true;
}

}  // namespace

std::string format_date(std::chrono::year_month_day date) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(date.year()), static_cast<unsigned>(date.month()),
                static_cast<unsigned>(date.day()));
  return buf;
}

std::optional<std::chrono::year_month_day> parse_date(std::string_view s) noexcept {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
  auto num = [&](std::size_t pos, std::size_t len, unsigned& out) {
    out = 0;
    for (std::size_t i = pos; i < pos + len; ++i) {
      if (s[i] < '0' || s[i] > '9') return false;
      out = out * 10 + static_cast<unsigned>(s[i] - '0');
    }
    return true;
  };
  unsigned y, m, d;
  if (!num(0, 4, y) || !num(5, 2, m) || !num(8, 2, d)) return std::nullopt;
  std::chrono::year_month_day ymd{std::chrono::year{static_cast<int>(y)}, std::chrono::month{m}, std::chrono::day{d}};
  if (!ymd.ok()) return std::nullopt;
  return ymd;
}

std::string serialize_cell(const CellValue& value) {
  return std::visit(overloaded{
                        [](const EmptyCell&) { return std::string{}; },
                        [](const SingleOption& v) { return v.option; },
                        [](const MultiOptions& v) { return text::join(v.options, kMultiSeparator); },
                        [](const DateValue& v) { return format_date(v.date); },
                        [](const TextValue& v) { return v.text; },
                        [](const NoteValue& v) { return v.text; },
                    },
                    value);
}

std::optional<CellValue> parse_cell(const TagDefinition& tag, std::string_view raw) {
  if (raw.empty()) return CellValue{EmptyCell{}};
  switch (tag.kind) {
    case TagKind::Single: {
      auto trimmed = text::trim(raw);
      if (!tag.has_option(trimmed)) return std::nullopt;
      return CellValue{SingleOption{std::string(trimmed)}};
    }
    case TagKind::Multi: {
      std::vector<std::string> members;
      for (const auto& part : text::split(raw, ';')) {
        auto trimmed = text::trim(part);
        if (!trimmed.empty()) members.emplace_back(trimmed);
      }
      if (!order_members(tag, members)) return std::nullopt;
      if (members.empty()) return CellValue{EmptyCell{}};
      return CellValue{MultiOptions{std::move(members)}};
    }
    case TagKind::Date: {
      auto date = parse_date(text::trim(raw));
      if (!date) return std::nullopt;
      return CellValue{DateValue{*date}};
    }
    case TagKind::Text: return CellValue{TextValue{std::string(raw)}};
    case TagKind::Note: return CellValue{NoteValue{std::string(raw)}};
  }
  return std::nullopt;
}

std::string_view variant_name(const CellValue& value) noexcept {
  static constexpr std::string_view names[] = {"Empty", "SingleOption", "MultiOptions", "DateValue", "TextValue",
                                               "NoteValue"};
  return names[value.index()];
}

CellValue canonical_cell(const TagDefinition& tag, CellValue value) {
  auto mismatch = [&] {
    return Error(ErrorCode::KindMismatch, tag.name + " is " + std::string(to_string(tag.kind)) + ", got " +
                                              std::string(variant_name(value)));
  };
  if (is_empty(value)) return value;
  switch (tag.kind) {
    case TagKind::Single: {
      auto* v = std::get_if<SingleOption>(&value);
      if (!v) throw mismatch();
      if (!tag.has_option(v->option)) throw Error(ErrorCode::UnknownOption, tag.name + ": '" + v->option + "'");
      return value;
    }
    case TagKind::Multi: {
      auto* v = std::get_if<MultiOptions>(&value);
      if (!v) throw mismatch();
      for (const auto& m : v->options) {
        if (!tag.has_option(m)) throw Error(ErrorCode::UnknownOption, tag.name + ": '" + m + "'");
      }
      order_members(tag, v->options);
      if (v->options.empty()) return EmptyCell{};
      return value;
    }
    case TagKind::Date:
      if (!std::holds_alternative<DateValue>(value)) throw mismatch();
      if (!std::get<DateValue>(value).date.ok()) throw Error(ErrorCode::InvalidCell, tag.name + ": invalid date");
      return value;
    case TagKind::Text: {
      auto* v = std::get_if<TextValue>(&value);
      if (!v) throw mismatch();
      if (v->text.empty()) return EmptyCell{};
      return value;
    }
    case TagKind::Note: {
      auto* v = std::get_if<NoteValue>(&value);
      if (!v) throw mismatch();
      if (v->text.empty()) return EmptyCell{};
      return value;
    }
  }
  return value;
}

std::vector<std::string_view> cell_options(const CellValue& value) {
  std::vector<std::string_view> out;
  if (auto* s = std::get_if<SingleOption>(&value)) {
    out.push_back(s->option);
  } else if (auto* m = std::get_if<MultiOptions>(&value)) {
    out.assign(m->options.begin(), m->options.end());
  }
  return out;
}

}  // namespace littag
