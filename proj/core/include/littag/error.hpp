#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace littag {

// Every failure surfaced by the library carries one of these names; the CLI
// prints the name on stderr and the service returns it in the error body.
enum class ErrorCode {
  MalformedCsv,
  MalformedWorkbook,
  UnknownKindKeyword,
  EmptyTagName,
  InvalidTagName,
  DuplicateTagName,
  DuplicateGroupName,
  EmptyGroup,
  EmptySchema,
  DuplicateOption,
  OptionContainsSeparator,
  ReservedOptionName,
  MissingOptions,
  NonBlankOptionRow,
  MissingRequiredColumn,
  DuplicateKey,
  EmptyKey,
  AmbiguousSignature,
  ColumnNameCollision,
  MissingKeyColumn,
  InvalidCell,
  InvalidBaseName,
  UnknownKey,
  UnknownTag,
  UnknownNote,
  KindMismatch,
  UnknownOption,
  InvalidOption,
  ColumnSetMismatch,
  DuplicateKeyConflict,
  NotEnoughDatabases,
  ParseError,
  UnknownColumn,
  KindNotTabulable,
  InvalidReportSpec,
  UnknownDatabase,
  DatabaseExists,
  UnknownVersion,
  WriterConflict,
  InvalidRequest,
  StorageError,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string detail);

  ErrorCode code() const noexcept { return code_; }
  std::string_view name() const noexcept { return to_string(code_); }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

// Raised by the filter parser. `position` is a byte offset into the input.
class FilterParseError : public Error {
 public:
  FilterParseError(std::size_t position, std::vector<std::string> expected);

  std::size_t position() const noexcept { return position_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

 private:
  std::size_t position_;
  std::vector<std::string> expected_;
};

}  // namespace littag
