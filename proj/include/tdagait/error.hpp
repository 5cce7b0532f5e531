#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tdagait {

enum class ErrorCode {
  kParse,
  kValidation,
  kTooShort,
  kEmptyCloud,
  kDegreeUnsupported,
  kTooLarge,
  kGridMismatch,
  kKindMismatch,
  kSubjectMismatch,
  kDegenerateLabels,
  kEmptyFeatures,
  kDimensionMismatch,
  kOneClassOnly,
  kConfig,
  kIo,
  kLeakage,
};

std::string_view error_code_name(ErrorCode code);

/// Single exception type for the library; `code()` tells callers which
/// contract was violated.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace tdagait
