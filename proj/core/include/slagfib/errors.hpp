#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace slagfib {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: wrong degree, mismatched dimensions, bad parameters.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A graph y + sigma(x) leaves the ambient domain ball.
class DomainEscape : public Error {
 public:
  DomainEscape(const std::string& msg, std::vector<double> offending_x)
      : Error(msg), x(std::move(offending_x)) {}
  std::vector<double> x;
};

/// A perturbed structure whose holomorphic volume form degenerates.
class DegenerateStructure : public Error {
 public:
  using Error::Error;
};

/// The period of Omega over the zero section vanishes.
class VanishingPeriod : public Error {
 public:
  using Error::Error;
};

/// Target of a Dirac inversion has a harmonic part beyond tolerance.
class ProjectionDefect : public Error {
 public:
  ProjectionDefect(const std::string& msg, double defect_value)
      : Error(msg), defect(defect_value) {}
  double defect;
};

/// Neumann series refused: measured contraction factor is not below 1/2.
class SmallnessViolation : public Error {
 public:
  SmallnessViolation(const std::string& msg, double factor)
      : Error(msg), contraction(factor) {}
  double contraction;
};

/// Section iteration failed to converge.
class Divergence : public Error {
 public:
  Divergence(const std::string& msg, std::vector<double> history)
      : Error(msg), residual_history(std::move(history)) {}
  std::vector<double> residual_history;
};

/// Converged section exceeds the delta budget of the certificate.
class BudgetViolation : public Error {
 public:
  BudgetViolation(const std::string& msg, double norm)
      : Error(msg), sigma_norm(norm) {}
  double sigma_norm;
};

/// A stated precondition of a check does not hold (names the violated bound).
class PreconditionViolation : public Error {
 public:
  using Error::Error;
};

/// Quadrature resolution insufficient for the requested tolerance.
class Undersampled : public Error {
 public:
  Undersampled(const std::string& msg, double uncertainty_value)
      : Error(msg), uncertainty(uncertainty_value) {}
  double uncertainty;
};

/// A per-fiber failure while assembling a fibration. The original error is
/// nested (std::throw_with_nested) and can be recovered with rethrow_if_nested.
class FiberError : public Error {
 public:
  FiberError(const std::string& msg, std::vector<double> base_point)
      : Error(msg), y(std::move(base_point)) {}
  std::vector<double> y;
};

}  // namespace slagfib
