#pragma once

#include <stdexcept>
#include <string>

namespace rham {

enum class ErrorCode {
  InvalidArgument,
  ParseError,
  ValidationError,
  FactorizationFailure,
  OutOfRange,
  Unsupported,
  NonFinite,
  NotAutonomous,
  RefinementOverflow,
  DegenerateOverlap,
  IOFailure,
};

const char* to_string(ErrorCode code) noexcept;

// All library failures are reported through this type; the C API maps
// code() onto its status enum.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace rham
