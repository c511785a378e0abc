#pragma once

#include <string>
#include <string_view>
#include <vector>

// RFC 4180 reader/writer. The reader accepts LF or CRLF line endings, a
// leading UTF-8 BOM, and quoted fields spanning several lines. The writer
// emits CRLF and quotes a field only when it contains a comma, a quote, CR
// or LF.
namespace littag::csv {

using Row = std::vector<std::string>;

// Throws Error(MalformedCsv) naming the 1-based record number on an
// unterminated quoted field or a quote inside an unquoted field.
std::vector<Row> parse(std::string_view bytes);

bool needs_quoting(std::string_view field) noexcept;
void append_field(std::string& out, std::string_view field);
void append_row(std::string& out, const Row& row);
std::string write(const std::vector<Row>& rows);

// True when every field of the record is empty (a blank line).
bool is_blank(const Row& row) noexcept;

}  // namespace littag::csv
