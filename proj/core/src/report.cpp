#include "littag/report.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

#include "littag/error.hpp"
#include "littag/query.hpp"
#include "littag/tagging.hpp"
#include "littag/text.hpp"

namespace littag {

namespace {

using nlohmann::json;

std::string string_member(const json& doc, const char* name, std::string fallback) {
  if (!doc.contains(name) || doc[name].is_null()) return fallback;
  if (!doc[name].is_string()) throw Error(ErrorCode::InvalidReportSpec, std::string(name) + " must be a string");
  return doc[name].get<std::string>();
}

bool bool_member(const json& doc, const char* name, bool fallback) {
  if (!doc.contains(name) || doc[name].is_null()) return fallback;
  if (!doc[name].is_boolean()) throw Error(ErrorCode::InvalidReportSpec, std::string(name) + " must be true or false");
  return doc[name].get<bool>();
}

std::vector<std::string> names_member(const json& doc, const char* name) {
  std::vector<std::string> out;
  if (!doc.contains(name) || doc[name].is_null()) return out;
  const auto& list = doc[name];
  if (!list.is_array()) throw Error(ErrorCode::InvalidReportSpec, std::string(name) + " must be a list of names");
  for (const auto& item : list) {
    if (!item.is_string()) throw Error(ErrorCode::InvalidReportSpec, std::string(name) + " must be a list of names");
    out.push_back(item.get<std::string>());
  }
  return out;
}

std::string escape_html(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&#39;"; break;
      default: out += c;
    }
  }
  return out;
}

// Multi-line notes keep their line breaks.
std::string escape_multiline(std::string_view s) {
  std::string out;
  for (const auto& line : text::split(s, '\n')) {
    if (!out.empty()) out += "<br>";
    std::string_view l = line;
    if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
    out += escape_html(l);
  }
  return out;
}

std::string first_author_surname(std::string_view author) {
  auto first = author.substr(0, author.find(';'));
  return text::to_lower(text::trim(first.substr(0, first.find(','))));
}

std::string doi_link(std::string_view doi) {
  std::string href(doi);
  if (!text::starts_with_ci(href, "http://") && !text::starts_with_ci(href, "https://")) href = "https://doi.org/" + href;
  return "<a href=\"" + escape_html(href) + "\">" + escape_html(doi) + "</a>";
}

constexpr std::string_view kStyle =
    "body{font-family:system-ui,sans-serif;margin:2em auto;max-width:60em;padding:0 1em;color:#222}"
    "h1{margin-bottom:.2em}.meta{color:#555}"
    "table{border-collapse:collapse;margin:.5em 0 1.5em}"
    "th,td{border:1px solid #bbb;padding:.25em .6em;text-align:left}"
    "td.n{text-align:right}th{background:#eee}"
    "article{border-top:1px solid #ddd;padding:.6em 0}"
    "dl{display:grid;grid-template-columns:max-content auto;gap:.2em 1em;margin:.4em 0 0}"
    "dt{font-weight:600}dd{margin:0}";

void counts_section(std::string& out, const TagDatabase& db, const ReportSpec& spec,
                    const std::vector<std::string>& keys) {
  auto counts = option_counts(db, keys);
  out += "<section class=\"counts\">\n<h2>Option counts</h2>\n";
  for (const auto& tag : counts.tags) {
    bool selected = std::find(spec.tags.begin(), spec.tags.end(), tag.tag) != spec.tags.end();
    if (spec.tags.empty() ? !is_selection(tag.kind) : !selected) continue;
    out += "<table>\n<caption>" + escape_html(tag.tag) + "</caption>\n<tr><th>Option</th><th>Papers</th></tr>\n";
    for (const auto& entry : tag.entries) {
      out += "<tr><td>" + escape_html(entry.label) + "</td><td class=\"n\">" + std::to_string(entry.count) +
             "</td></tr>\n";
    }
    out += "</table>\n";
  }
  out += "</section>\n";
}

void crosstab_section(std::string& out, const CrossTab& tab) {
  out += "<section class=\"crosstab\">\n<h2>" + escape_html(tab.row_tag) + " by " + escape_html(tab.col_tag) +
         "</h2>\n<table>\n<tr><th></th>";
  for (const auto& label : tab.col_labels) out += "<th>" + escape_html(label) + "</th>";
  out += "</tr>\n";
  for (std::size_t r = 0; r < tab.row_labels.size(); ++r) {
    out += "<tr><th>" + escape_html(tab.row_labels[r]) + "</th>";
    for (auto n : tab.counts[r]) out += "<td class=\"n\">" + std::to_string(n) + "</td>";
    out += "</tr>\n";
  }
  out += "</table>\n</section>\n";
}

void paper_section(std::string& out, const TagDatabase& db, const ReportSpec& spec, const DatabaseRow& row) {
  out += "<article class=\"paper\" id=\"" + escape_html(row.key) + "\">\n";
  if (spec.include_citation) {
    auto field = [&](std::string_view column) { return std::string(row.citation_value(column)); };
    std::vector<std::string> parts;
    if (auto a = field("Author"); !a.empty()) parts.push_back(escape_html(a));
    if (auto y = field("Publication Year"); !y.empty()) parts.push_back("(" + escape_html(y) + ")");
    if (auto t = field("Title"); !t.empty()) parts.push_back("<strong>" + escape_html(t) + "</strong>.");
    if (auto p = field("Publication Title"); !p.empty()) parts.push_back("<em>" + escape_html(p) + "</em>.");
    if (auto d = field("DOI"); !d.empty()) parts.push_back(doi_link(d));
    out += "<p class=\"citation\">" + text::join(parts, " ") + "</p>\n";
  } else {
    out += "<p class=\"citation\">" + escape_html(row.key) + "</p>\n";
  }
  if (!spec.tags.empty() || !spec.notes.empty()) {
    out += "<dl>\n";
    auto entry = [&](const std::string& name) {
      out += "<dt>" + escape_html(name) + "</dt><dd>" + escape_multiline(db.cell_text(row, name)) + "</dd>\n";
    };
    for (const auto& name : spec.tags) entry(name);
    for (const auto& name : spec.notes) entry(name);
    out += "</dl>\n";
  }
  out += "</article>\n";
}

}  // namespace

ReportSpec parse_report_spec(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidReportSpec, e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::InvalidReportSpec, "expected a JSON object");

  ReportSpec spec;
  spec.title = string_member(doc, "title", spec.title);
  if (auto filter = string_member(doc, "filter", ""); !text::trim(filter).empty()) spec.filter = parse_filter(filter);
  spec.include_citation = bool_member(doc, "include_citation", spec.include_citation);
  spec.include_option_counts = bool_member(doc, "include_option_counts", spec.include_option_counts);
  spec.tags = names_member(doc, "tags");
  spec.notes = names_member(doc, "notes");
  if (doc.contains("crosstabs") && !doc["crosstabs"].is_null()) {
    if (!doc["crosstabs"].is_array()) throw Error(ErrorCode::InvalidReportSpec, "crosstabs must be a list");
    for (const auto& item : doc["crosstabs"]) {
      CrosstabRequest req;
      if (item.is_object()) {
        req.rows = string_member(item, "rows", "");
        req.cols = string_member(item, "cols", "");
      } else if (item.is_array() && item.size() == 2 && item[0].is_string() && item[1].is_string()) {
        req.rows = item[0].get<std::string>();
        req.cols = item[1].get<std::string>();
      }
      if (req.rows.empty() || req.cols.empty()) {
        throw Error(ErrorCode::InvalidReportSpec, "crosstab entries need rows and cols tag names");
      }
      spec.crosstabs.push_back(std::move(req));
    }
  }
  return spec;
}

void check_report_spec(const TagDatabase& db, const ReportSpec& spec) {
  for (const auto& name : spec.tags) {
    const auto* def = db.schema().find(name);
    if (def == nullptr || def->kind == TagKind::Note) throw Error(ErrorCode::UnknownTag, name);
  }
  for (const auto& name : spec.notes) {
    const auto* def = db.schema().find(name);
    if (def == nullptr || def->kind != TagKind::Note) throw Error(ErrorCode::UnknownNote, name);
  }
  for (const auto& req : spec.crosstabs) crosstab(TagDatabase(db.schema()), req.rows, req.cols);
  if (spec.filter) bind_filter(db, *spec.filter);
}

std::string build_report(const TagDatabase& db, const ReportSpec& spec, UtcInstant generated_at) {
  check_report_spec(db, spec);

  std::vector<std::size_t> rows;
  if (spec.filter) {
    rows = filter_rows(db, *spec.filter);
  } else {
    rows.resize(db.size());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  }
  std::vector<std::string> keys;
  for (auto i : rows) keys.push_back(db.rows()[i].key);

  std::vector<std::pair<std::string, std::size_t>> order;
  for (auto i : rows) order.emplace_back(first_author_surname(db.rows()[i].citation_value("Author")), i);
  std::stable_sort(order.begin(), order.end(), [&](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return db.rows()[a.second].citation_value("Publication Year") <
           db.rows()[b.second].citation_value("Publication Year");
  });

  std::string out;
  out += "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n<title>" + escape_html(spec.title) +
         "</title>\n<style>";
  out += kStyle;
  out += "</style>\n</head>\n<body>\n<h1>" + escape_html(spec.title) + "</h1>\n";
  out += "<p class=\"meta\">Generated " + format_iso_utc(generated_at) + ". " + std::to_string(rows.size()) +
         (rows.size() == 1 ? " paper" : " papers") + " of " + std::to_string(db.size()) + ".";
  if (spec.filter) out += " Filter: <code>" + escape_html(print_filter(*spec.filter)) + "</code>";
  out += "</p>\n";

  if (spec.include_option_counts) counts_section(out, db, spec, keys);
  for (const auto& req : spec.crosstabs) crosstab_section(out, crosstab(db, req.rows, req.cols, spec.filter));

  out += "<section class=\"papers\">\n<h2>Papers</h2>\n";
  if (rows.empty()) out += "<p>0 papers</p>\n";
  for (const auto& [surname, i] : order) paper_section(out, db, spec, db.rows()[i]);
  out += "</section>\n</body>\n</html>\n";
  return out;
}

}  // namespace littag
