#include "littag/csv.hpp"

#include <algorithm>

#include "littag/error.hpp"
#include "littag/text.hpp"

namespace littag::csv {

std::vector<Row> parse(std::string_view bytes) {
  bytes = text::strip_bom(bytes);
  std::vector<Row> rows;
  if (bytes.empty()) return rows;

  Row row;
  std::string field;
  std::size_t i = 0;
  const std::size_t n = bytes.size();
  auto record_number = [&] { return std::to_string(rows.size() + 1); };

  for (;;) {
    // Start of a field.
    if (i < n && bytes[i] == '"') {
      ++i;
      for (;;) {
        if (i >= n) throw Error(ErrorCode::MalformedCsv, "unterminated quoted field in record " + record_number());
        char c = bytes[i++];
        if (c == '"') {
          if (i < n && bytes[i] == '"') {
            field += '"';
            ++i;
          } else {
            break;
          }
        } else {
          field += c;
        }
      }
      if (i < n && bytes[i] != ',' && bytes[i] != '\n' && bytes[i] != '\r') {
        throw Error(ErrorCode::MalformedCsv, "unexpected character after closing quote in record " + record_number());
      }
    } else {
      while (i < n && bytes[i] != ',' && bytes[i] != '\n' && bytes[i] != '\r') {
        if (bytes[i] == '"') {
          throw Error(ErrorCode::MalformedCsv, "quote inside unquoted field in record " + record_number());
        }
        field += bytes[i++];
      }
    }
    row.push_back(std::move(field));
    field.clear();

    if (i >= n) {
      rows.push_back(std::move(row));
      break;
    }
    char sep = bytes[i++];
    if (sep == ',') continue;
    if (sep == '\r' && i < n && bytes[i] == '\n') ++i;
    rows.push_back(std::move(row));
    row.clear();
    if (i >= n) break;
  }
  return rows;
}

bool needs_quoting(std::string_view field) noexcept {
  return field.find_first_of(",\"\r\n") != std::string_view::npos;
}

void append_field(std::string& out, std::string_view field) {
  if (!needs_quoting(field)) {
    out += field;
    return;
  }
  out += '"';
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
}

void append_row(std::string& out, const Row& row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i > 0) out += ',';
    append_field(out, row[i]);
  }
  out += "\r\n";
}

std::string write(const std::vector<Row>& rows) {
  std::string out;
  for (const auto& row : rows) append_row(out, row);
  return out;
}

bool is_blank(const Row& row) noexcept {
  return std::all_of(row.begin(), row.end(), [](const std::string& f) { return f.empty(); });
}

}  // namespace littag::csv
