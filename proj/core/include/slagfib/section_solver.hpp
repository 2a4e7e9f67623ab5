#pragma once

#include <optional>
#include <vector>

#include "slagfib/certificate.hpp"
#include "slagfib/deformation.hpp"

namespace slagfib {

enum class SolveMode { FixedSlope, Newton };

struct SolveOptions {
  SolveMode mode = SolveMode::FixedSlope;
  double tol = 1e-10;  // surrogate residual norm
  int max_iterations = 200;
  std::optional<TorusForm> initial;
  bool enforce_budget = true;  // ||sigma|| <= delta
};

struct SolveResult {
  GraphSection section;
  int iterations = 0;
  std::vector<double> residual_history;  // entry 0 is the initial residual
  double sigma_norm = 0.0;               // C^{1,alpha} surrogate
  double residual_norm = 0.0;
};

/// Solves F(y, sigma) = 0 for sigma with zero harmonic part. The fixed-slope
/// iteration sigma <- sigma - A^{-1} F(y, sigma), A = D_sigma F(0, 0), is the
/// reference; Newton replaces A by D_sigma F(y, sigma) and has the same fixed point.
class SectionSolver {
 public:
  SectionSolver(const DeformationProblem& problem, IFTCertificate certificate);

  const DeformationProblem& problem() const { return *problem_; }
  const IFTCertificate& certificate() const { return cert_; }

  /// Requires hypotheses_ok and |y| < 3r/2. Throws Divergence or BudgetViolation.
  SolveResult solve(const Eigen::VectorXd& y, const SolveOptions& options = {}) const;

  /// D sigma(y) e_j = -D_sigma F(y, sigma)^{-1} D_y F(y, sigma) e_j, one column per base direction.
  std::vector<TorusForm> solution_derivative(const Eigen::VectorXd& y, const TorusForm& sigma) const;

  /// A^{-1} applied to a residual.
  TorusForm apply_frozen_inverse(const Residual& r) const;
  /// D_sigma F(y, sigma)^{-1} applied to a residual.
  TorusForm apply_tangent_inverse(const Eigen::VectorXd& y, const TorusForm& sigma, const Residual& r) const;

 private:
  const DeformationProblem* problem_;
  IFTCertificate cert_;
  std::function<Residual(const TorusForm&)> frozen_;
};

}  // namespace slagfib
