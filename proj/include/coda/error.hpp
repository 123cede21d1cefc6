#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace coda {

enum class ErrorKind {
  ConflictingBinding,
  MissingAttribute,
  SchemaMismatch,
  InvalidSchema,
  InvalidTree,
  NoCoveringParent,
  PlanIsTerminal,
  BadOverlap,
  NotNice,
  InvalidLinearization,
  ValidationFailed,
  ProtocolViolation,
  DisconnectedQuery,
  NotFailing,
  ParseError,
};

std::string_view to_string(ErrorKind kind);

// Every failure raised by the library carries a machine-readable kind so the
// harness can turn it into a structured verdict instead of a crash.
class CodaError : public std::runtime_error {
 public:
  CodaError(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace coda
