#include "tdagait/error.hpp"

namespace tdagait {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParse: return "ParseError";
    case ErrorCode::kValidation: return "ValidationError";
    case ErrorCode::kTooShort: return "TooShort";
    case ErrorCode::kEmptyCloud: return "EmptyCloud";
    case ErrorCode::kDegreeUnsupported: return "DegreeUnsupported";
    case ErrorCode::kTooLarge: return "TooLarge";
    case ErrorCode::kGridMismatch: return "GridMismatch";
    case ErrorCode::kKindMismatch: return "KindMismatch";
    case ErrorCode::kSubjectMismatch: return "SubjectMismatch";
    case ErrorCode::kDegenerateLabels: return "DegenerateLabels";
    case ErrorCode::kEmptyFeatures: return "EmptyFeatures";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kOneClassOnly: return "OneClassOnly";
    case ErrorCode::kConfig: return "ConfigError";
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kLeakage: return "LeakageError";
  }
  return "Error";
}

}  // namespace tdagait
