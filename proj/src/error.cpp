#include "coda/error.hpp"

namespace coda {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ConflictingBinding: return "ConflictingBinding";
    case ErrorKind::MissingAttribute: return "MissingAttribute";
    case ErrorKind::SchemaMismatch: return "SchemaMismatch";
    case ErrorKind::InvalidSchema: return "InvalidSchema";
    case ErrorKind::InvalidTree: return "InvalidTree";
    case ErrorKind::NoCoveringParent: return "NoCoveringParent";
    case ErrorKind::PlanIsTerminal: return "PlanIsTerminal";
    case ErrorKind::BadOverlap: return "BadOverlap";
    case ErrorKind::NotNice: return "NotNice";
    case ErrorKind::InvalidLinearization: return "InvalidLinearization";
    case ErrorKind::ValidationFailed: return "ValidationFailed";
    case ErrorKind::ProtocolViolation: return "ProtocolViolation";
    case ErrorKind::DisconnectedQuery: return "DisconnectedQuery";
    case ErrorKind::NotFailing: return "NotFailing";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

CodaError::CodaError(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

}  // namespace coda
