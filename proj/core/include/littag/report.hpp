#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "littag/database.hpp"
#include "littag/filter.hpp"
#include "littag/timestamp.hpp"

namespace littag {

struct CrosstabRequest {
  std::string rows;
  std::string cols;
  friend bool operator==(const CrosstabRequest&, const CrosstabRequest&) = default;
};

struct ReportSpec {
  std::string title = "Literature report";
  std::optional<FilterExpr> filter;
  bool include_citation = true;
  std::vector<std::string> tags;   // non-note tags shown per paper
  std::vector<std::string> notes;  // note fields shown per paper
  std::vector<CrosstabRequest> crosstabs;
  // Counts for the selected tags, or for every selection tag when none are selected.
  bool include_option_counts = false;
};

// JSON form:
//   {"title": "...", "filter": "StudyType == \"Lab\"", "include_citation": true,
//    "tags": ["StudyType"], "notes": ["Summary"],
//    "crosstabs": [{"rows": "StudyType", "cols": "Region"}],
//    "include_option_counts": true}
// Every member is optional. Throws InvalidReportSpec, or ParseError for the filter.
ReportSpec parse_report_spec(std::string_view json);

// Throws UnknownTag / UnknownNote / KindNotTabulable / UnknownColumn.
void check_report_spec(const TagDatabase& db, const ReportSpec& spec);

// Single-file HTML5 document with inline styles. Papers are ordered by first
// author surname, then year, then database order.
std::string build_report(const TagDatabase& db, const ReportSpec& spec, UtcInstant generated_at);

}  // namespace littag
