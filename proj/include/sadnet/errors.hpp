#pragma once

#include <stdexcept>
#include <string>

namespace sadnet {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Shape problems (mismatched dimensions, non-square weight matrices). These
// are distinct from invariant violations, which are reported through
// ValidationReport instead of thrown.
struct StructuralError : Error {
  using Error::Error;
};

// A scenario or input failed validation.
struct ValidationError : Error {
  using Error::Error;
};

// An operation was called with arguments outside its stated domain.
struct PreconditionError : Error {
  using Error::Error;
};

// An iterative solver hit its iteration cap.
struct NonconvergenceError : Error {
  NonconvergenceError(const std::string& msg, double residual)
      : Error(msg), last_residual(residual) {}
  double last_residual;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace sadnet
