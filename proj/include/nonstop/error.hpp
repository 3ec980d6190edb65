#pragma once

#include <stdexcept>
#include <string>

namespace nonstop {

enum class ErrorCode {
  kInvalidArgument,
  kIndexOutOfRange,
  kDegenerateDirection,
  kAllocationSingular,
  kBasisDimension,
  kLowTension,
  kParse,
  kValidation,
  kSimulationAbort,
  kOptimizerFailure,
  kIo,
};

const char* error_code_name(ErrorCode code);

// Every failure raised by the library carries a code so the C API can map it
// onto a status value without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Low-tension failures name the carrier so callers can surface it.
class LowTensionError : public Error {
 public:
  LowTensionError(int carrier, double tension, double floor);

  int carrier() const noexcept { return carrier_; }
  double tension() const noexcept { return tension_; }

 private:
  int carrier_;
  double tension_;
};

}  // namespace nonstop
