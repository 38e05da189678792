#include <cstring>

#include "doctest.h"
#include "normtag/error.hpp"

using namespace normtag;

TEST_CASE("errors carry their code and a prefixed message") {
  Error e(ErrorCode::ColumnCount, "line 3: expected 2 columns");
  CHECK(e.code() == ErrorCode::ColumnCount);
  CHECK(std::strstr(e.what(), "line 3") != nullptr);
  CHECK(std::strstr(e.what(), error_code_name(ErrorCode::ColumnCount)) != nullptr);
}

TEST_CASE("every error code has a distinct printable name") {
  const ErrorCode codes[] = {
      ErrorCode::EmptyInput,   ErrorCode::UnknownTag,      ErrorCode::ColumnCount,
      ErrorCode::EmptyCell,    ErrorCode::BadFormat,       ErrorCode::DimMismatch,
      ErrorCode::MissingLayer, ErrorCode::LengthMismatch,  ErrorCode::IndexOutOfRange,
      ErrorCode::NoPositiveInstances, ErrorCode::Truncated, ErrorCode::VersionMismatch,
      ErrorCode::MissingResource, ErrorCode::BadArgument,  ErrorCode::IoError,
  };
  for (size_t i = 0; i < std::size(codes); ++i) {
    CHECK(error_code_name(codes[i]) != nullptr);
    CHECK(std::strlen(error_code_name(codes[i])) > 0);
    for (size_t j = i + 1; j < std::size(codes); ++j)
      CHECK(std::strcmp(error_code_name(codes[i]), error_code_name(codes[j])) != 0);
  }
}
