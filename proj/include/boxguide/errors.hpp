#pragma once

#include <stdexcept>
#include <string>

namespace boxguide {

// Argument outside the admissible set (geometry, spectral window, family/λ mismatch).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Interface system singular or too ill-conditioned to trust.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Iterative procedure (mode refinement, fixed point, inner solve) did not converge.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// S11 = -1 in the reduction formula: the physical reflection has a removable
// pole there and a trapped mode is present.
class PoleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Basis change between stabilized and standard exponential waves is degenerate.
class ConversionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Fixed-point step left the domain of arcsin.
class StepError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace boxguide
