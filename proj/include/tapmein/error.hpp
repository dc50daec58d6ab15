#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tapmein {

enum class ErrorCode {
  kNonMonotonicTimestamps,
  kOutOfRangeChannel,
  kBadLength,
  kEmptySeries,
  kEmptyCorpus,
  kEmptyMatrix,
  kSingleClassTraining,
  kDimensionMismatch,
  kInsufficientEnrollment,
  kInconsistentLength,
  kEmptyScoreSet,
  kInsufficientGenuine,
  kInvalidArgument,
  kNotFound,
  kCorruptRecord,
  kSchemaViolation,
  kConflict,
  kIo,
};

std::string_view ErrorCodeName(ErrorCode code);

// Single exception type for the engine; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace tapmein
