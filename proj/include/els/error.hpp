#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace els {

enum class ErrorCode {
  InvalidGrid,
  GridMismatch,
  UnsupportedOrder,
  ParodiViolation,
  NonPositiveGamma1,
  DissipationViolation,
  RangeError,
  InvalidArgument,
  UnresolvedField,
  NonUnitDirector,
  CFLViolation,
  BlowupDetected,
  NotConverged,
  SingularLinearization,
  UnconvergedInput,
  WindingMismatch,
  InsufficientSamples,
  NonPositiveDistances,
  ParseError,
  IoError,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries a code so callers (the CLI in
// particular) can map it onto an exit status without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace els
