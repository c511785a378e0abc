#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "littag/database.hpp"
#include "littag/filter.hpp"

// Brute-force reference implementations. They read the database only
// through its serialized CSV text, and share nothing with the query module
// apart from the AST types.
namespace littag::testing {

struct PlainTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;  // Key is column 0
  std::set<std::string> multi_columns;
  std::set<std::string> date_columns;

  std::size_t column(const std::string& name) const;  // throws std::out_of_range
};

PlainTable plain_table(const TagDatabase& db);

std::vector<std::string> oracle_filter(const PlainTable& table, const FilterExpr& expr);

// Members of a serialized selection cell ("a; b"); {"(none)"} when blank.
std::vector<std::string> oracle_labels(const std::string& cell);

// counts[row label][col label] by explicit pair enumeration.
std::map<std::string, std::map<std::string, std::size_t>> oracle_crosstab(const PlainTable& table,
                                                                          const std::string& row_tag,
                                                                          const std::string& col_tag,
                                                                          const std::vector<std::string>& keys);

// Papers in `keys` whose cell for `tag` carries `label`.
std::size_t oracle_count(const PlainTable& table, const std::string& tag, const std::string& label,
                         const std::vector<std::string>& keys);

}  // namespace littag::testing
