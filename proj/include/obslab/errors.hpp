#pragma once
// Error taxonomy. Every failure carries the name of the originating module
// so front ends can report provenance.

#include <obslab/scalar.hpp>

#include <stdexcept>
#include <string>
#include <utility>

namespace obslab {

class Error : public std::runtime_error {
 public:
  Error(std::string module, const std::string& message)
      : std::runtime_error(module + ": " + message), module_(std::move(module)) {}
  const std::string& module() const noexcept { return module_; }

 private:
  std::string module_;
};

// precondition violation / rejected input
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// working precision insufficient for the requested computation
class PrecisionFailure : public Error {
 public:
  using Error::Error;
};

// iterative refinement failed to certify the requested tolerance
class ConvergenceFailure : public Error {
 public:
  ConvergenceFailure(std::string module, const std::string& message, Real achieved_bound)
      : Error(std::move(module), message + " (achieved bound " + format_real(achieved_bound, 6) + ")"),
        achieved_bound_(std::move(achieved_bound)) {}
  const Real& achieved_bound() const noexcept { return achieved_bound_; }

 private:
  Real achieved_bound_;
};

}  // namespace obslab
