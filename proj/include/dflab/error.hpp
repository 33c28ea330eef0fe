#pragma once

#include <stdexcept>
#include <string>

namespace dflab {

/// Invalid input: malformed configuration, unsupported model, violated
/// precondition. The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A computation could not be carried out to the requested accuracy
/// (non-PD Gram matrix, degenerate Hessian, unresolved quadrature).
/// The CLI maps this to exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Quadrature rule cannot certify the requested polynomial exactness.
class ExactnessError : public NumericalError {
 public:
  ExactnessError(const std::string& what, int achieved)
      : NumericalError(what), achieved_(achieved) {}
  int achieved() const { return achieved_; }

 private:
  int achieved_;
};

/// Operation is undefined for this model (e.g. scalar curvature of a
/// perturbed metric). Callers are expected to catch it and skip.
class Unsupported : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dflab
