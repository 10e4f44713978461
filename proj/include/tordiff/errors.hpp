#pragma once

#include <stdexcept>
#include <string>

namespace tordiff {

/// Numerical procedure failed (quadrature, root find, series divergence, ...).
class NumericError : public std::runtime_error {
  public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// An iterative algorithm exhausted its budget without meeting its tolerance.
class ConvergenceError : public NumericError {
  public:
    explicit ConvergenceError(const std::string& what) : NumericError(what) {}
};

}  // namespace tordiff
