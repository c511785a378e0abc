#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "littag/csv.hpp"

// Minimal Office Open XML (.xlsx) reader: enough to pull the cell text of
// every visible worksheet. No formulas are evaluated; cached values are used.
namespace littag::workbook {

struct Sheet {
  std::string name;
  // Dense grid, row-major; missing cells are empty strings. Each row is
  // padded to the widest row of the sheet.
  std::vector<csv::Row> rows;
};

// True when the bytes start with a ZIP local file header.
bool looks_like_zip(std::string_view bytes) noexcept;

// Visible sheets in workbook order. Throws Error(MalformedWorkbook).
std::vector<Sheet> read_xlsx(std::string_view bytes);

}  // namespace littag::workbook
