#include "tetra/common.hpp"

namespace tetra {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kStoreClosed: return "StoreClosed";
    case ErrorCode::kObjectTooLarge: return "ObjectTooLarge";
    case ErrorCode::kNotFound: return "NotFound";
    case ErrorCode::kCorruptEntry: return "CorruptEntry";
    case ErrorCode::kFormatMismatch: return "FormatMismatch";
    case ErrorCode::kNoWritesYet: return "NoWritesYet";
    case ErrorCode::kIllegalEscalation: return "IllegalEscalation";
    case ErrorCode::kParentRevoked: return "ParentRevoked";
    case ErrorCode::kParentExpired: return "ParentExpired";
    case ErrorCode::kUnknownCapability: return "UnknownCapability";
    case ErrorCode::kWriterActive: return "WriterActive";
    case ErrorCode::kReadersActive: return "ReadersActive";
    case ErrorCode::kStaleLease: return "StaleLease";
    case ErrorCode::kDoubleRelease: return "DoubleRelease";
    case ErrorCode::kUnknownObject: return "UnknownObject";
    case ErrorCode::kUnknownNode: return "UnknownNode";
    case ErrorCode::kSchemaViolation: return "SchemaViolation";
    case ErrorCode::kCapabilityRejected: return "CapabilityRejected";
    case ErrorCode::kDegreeBoundExceeded: return "DegreeBoundExceeded";
    case ErrorCode::kTypeMismatch: return "TypeMismatch";
    case ErrorCode::kNonMonotoneTick: return "NonMonotoneTick";
    case ErrorCode::kMissingContent: return "MissingContent";
    case ErrorCode::kIllegalFromState: return "IllegalFromState";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kInvalidParams: return "InvalidParams";
    case ErrorCode::kEngineUnavailable: return "EngineUnavailable";
    case ErrorCode::kEmptyLog: return "EmptyLog";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kUnknownKey: return "UnknownKey";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

}  // namespace tetra
