#include "normtag/error.hpp"

namespace normtag {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::UnknownTag: return "UnknownTag";
    case ErrorCode::ColumnCount: return "ColumnCount";
    case ErrorCode::EmptyCell: return "EmptyCell";
    case ErrorCode::BadFormat: return "BadFormat";
    case ErrorCode::DimMismatch: return "DimMismatch";
    case ErrorCode::MissingLayer: return "MissingLayer";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::NoPositiveInstances: return "NoPositiveInstances";
    case ErrorCode::Truncated: return "Truncated";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::MissingResource: return "MissingResource";
    case ErrorCode::BadArgument: return "BadArgument";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace normtag
