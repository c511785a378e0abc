#include "littag/error.hpp"

namespace littag {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MalformedCsv: return "MalformedCsv";
    case ErrorCode::MalformedWorkbook: return "MalformedWorkbook";
    case ErrorCode::UnknownKindKeyword: return "UnknownKindKeyword";
    case ErrorCode::EmptyTagName: return "EmptyTagName";
    case ErrorCode::InvalidTagName: return "InvalidTagName";
    case ErrorCode::DuplicateTagName: return "DuplicateTagName";
    case ErrorCode::DuplicateGroupName: return "DuplicateGroupName";
    case ErrorCode::EmptyGroup: return "EmptyGroup";
    case ErrorCode::EmptySchema: return "EmptySchema";
    case ErrorCode::DuplicateOption: return "DuplicateOption";
    case ErrorCode::OptionContainsSeparator: return "OptionContainsSeparator";
    case ErrorCode::ReservedOptionName: return "ReservedOptionName";
    case ErrorCode::MissingOptions: return "MissingOptions";
    case ErrorCode::NonBlankOptionRow: return "NonBlankOptionRow";
    case ErrorCode::MissingRequiredColumn: return "MissingRequiredColumn";
    case ErrorCode::DuplicateKey: return "DuplicateKey";
    case ErrorCode::EmptyKey: return "EmptyKey";
    case ErrorCode::AmbiguousSignature: return "AmbiguousSignature";
    case ErrorCode::ColumnNameCollision: return "ColumnNameCollision";
    case ErrorCode::MissingKeyColumn: return "MissingKeyColumn";
    case ErrorCode::InvalidCell: return "InvalidCell";
    case ErrorCode::InvalidBaseName: return "InvalidBaseName";
    case ErrorCode::UnknownKey: return "UnknownKey";
    case ErrorCode::UnknownTag: return "UnknownTag";
    case ErrorCode::UnknownNote: return "UnknownNote";
    case ErrorCode::KindMismatch: return "KindMismatch";
    case ErrorCode::UnknownOption: return "UnknownOption";
    case ErrorCode::InvalidOption: return "InvalidOption";
    case ErrorCode::ColumnSetMismatch: return "ColumnSetMismatch";
    case ErrorCode::DuplicateKeyConflict: return "DuplicateKeyConflict";
    case ErrorCode::NotEnoughDatabases: return "NotEnoughDatabases";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnknownColumn: return "UnknownColumn";
    case ErrorCode::KindNotTabulable: return "KindNotTabulable";
    case ErrorCode::InvalidReportSpec: return "InvalidReportSpec";
    case ErrorCode::UnknownDatabase: return "UnknownDatabase";
    case ErrorCode::DatabaseExists: return "DatabaseExists";
    case ErrorCode::UnknownVersion: return "UnknownVersion";
    case ErrorCode::WriterConflict: return "WriterConflict";
    case ErrorCode::InvalidRequest: return "InvalidRequest";
    case ErrorCode::StorageError: return "StorageError";
  }
  return "Unknown";
}

namespace {

std::string compose(ErrorCode code, const std::string& detail) {
  std::string out(to_string(code));
  if (!detail.empty()) {
    out += ": ";
    out += detail;
  }
  return out;
}

std::string describe_expected(std::size_t position, const std::vector<std::string>& expected) {
  std::string out = "at position " + std::to_string(position) + ", expected ";
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (i > 0) out += i + 1 == expected.size() ? " or " : ", ";
    out += expected[i];
  }
  return out;
}

}  // namespace

Error::Error(ErrorCode code, std::string detail)
    : std::runtime_error(compose(code, detail)), code_(code), detail_(std::move(detail)) {}

FilterParseError::FilterParseError(std::size_t position, std::vector<std::string> expected)
    : Error(ErrorCode::ParseError, describe_expected(position, expected)),
      position_(position),
      expected_(std::move(expected)) {}

}  // namespace littag
