#pragma once

#include <stdexcept>
#include <string>

namespace normtag {

enum class ErrorCode {
  EmptyInput,
  UnknownTag,
  ColumnCount,
  EmptyCell,
  BadFormat,
  DimMismatch,
  MissingLayer,
  LengthMismatch,
  IndexOutOfRange,
  NoPositiveInstances,
  Truncated,
  VersionMismatch,
  MissingResource,
  BadArgument,
  IoError,
};

const char* error_code_name(ErrorCode code);

// Single exception type for the whole library. `code()` lets callers and
// tests distinguish failure kinds without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace normtag
