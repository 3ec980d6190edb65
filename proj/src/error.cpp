#include "nonstop/error.hpp"

#include <cstdio>

namespace nonstop {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kIndexOutOfRange: return "index_out_of_range";
    case ErrorCode::kDegenerateDirection: return "degenerate_direction";
    case ErrorCode::kAllocationSingular: return "allocation_singular";
    case ErrorCode::kBasisDimension: return "basis_dimension";
    case ErrorCode::kLowTension: return "low_tension";
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kValidation: return "validation";
    case ErrorCode::kSimulationAbort: return "simulation_abort";
    case ErrorCode::kOptimizerFailure: return "optimizer_failure";
    case ErrorCode::kIo: return "io";
  }
  return "unknown";
}

namespace {

std::string low_tension_message(int carrier, double tension, double floor) {
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "desired tension of carrier %d is %.6g N, below the floor %.6g N",
                carrier, tension, floor);
  return buf;
}

}  // namespace

LowTensionError::LowTensionError(int carrier, double tension, double floor)
    : Error(ErrorCode::kLowTension, low_tension_message(carrier, tension, floor)),
      carrier_(carrier),
      tension_(tension) {}

}  // namespace nonstop
