#include "tapmein/error.hpp"

namespace tapmein {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNonMonotonicTimestamps: return "NonMonotonicTimestamps";
    case ErrorCode::kOutOfRangeChannel: return "OutOfRangeChannel";
    case ErrorCode::kBadLength: return "BadLength";
    case ErrorCode::kEmptySeries: return "EmptySeries";
    case ErrorCode::kEmptyCorpus: return "EmptyCorpus";
    case ErrorCode::kEmptyMatrix: return "EmptyMatrix";
    case ErrorCode::kSingleClassTraining: return "SingleClassTraining";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kInsufficientEnrollment: return "InsufficientEnrollment";
    case ErrorCode::kInconsistentLength: return "InconsistentLength";
    case ErrorCode::kEmptyScoreSet: return "EmptyScoreSet";
    case ErrorCode::kInsufficientGenuine: return "InsufficientGenuine";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kNotFound: return "NotFound";
    case ErrorCode::kCorruptRecord: return "CorruptRecord";
    case ErrorCode::kSchemaViolation: return "SchemaViolation";
    case ErrorCode::kConflict: return "Conflict";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

}  // namespace tapmein
