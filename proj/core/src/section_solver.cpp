#include "slagfib/section_solver.hpp"

#include <cmath>

#include "slagfib/errors.hpp"
#include "slagfib/neumann.hpp"
#include "slagfib/norms.hpp"

namespace slagfib {

namespace {

// Aliasing can leave a tiny harmonic part in computed residuals; the exact
// residual has none because periods are homotopy invariant.
Residual projected(Residual r) {
  r.second.remove_harmonic();
  if (r.first) r.first->remove_harmonic();
  return r;
}

constexpr double kResidualDefectTol = 1e-8;

}  // namespace

SectionSolver::SectionSolver(const DeformationProblem& problem, IFTCertificate certificate)
    : problem_(&problem), cert_(std::move(certificate)), frozen_(frozen_perturbation(problem)) {}

TorusForm SectionSolver::apply_frozen_inverse(const Residual& r) const {
  const auto& D = problem_->dirac();
  const double defect = D.projection_defect(r);
  if (defect > kResidualDefectTol) throw ProjectionDefect("residual has a harmonic part", defect);
  if (!frozen_) return D.invert(projected(r));
  return perturbed_invert(D, frozen_, projected(r), cert_.contraction_at_zero).solution;
}

TorusForm SectionSolver::apply_tangent_inverse(const Eigen::VectorXd& y, const TorusForm& sigma,
                                               const Residual& r) const {
  const auto& D = problem_->dirac();
  const double defect = D.projection_defect(r);
  if (defect > kResidualDefectTol) throw ProjectionDefect("residual has a harmonic part", defect);
  const DeformationProblem& P = *problem_;
  SectionOperator V = [&P, &y, &sigma](const TorusForm& d) { return P.perturbation(y, sigma, d); };
  if (P.structure().is_flat() && P.dim() <= 2) return D.invert(projected(r));
  return perturbed_invert(D, V, projected(r), cert_.contraction_bound, 1e-14, 200, 1e-8).solution;
}

SolveResult SectionSolver::solve(const Eigen::VectorXd& y, const SolveOptions& opt) const {
  if (!cert_.hypotheses_ok) throw PreconditionViolation("certificate hypotheses do not hold");
  if (y.size() != problem_->dim()) throw InvalidInput("base point has wrong dimension");
  if (!(y.norm() < cert_.base_radius())) {
    throw PreconditionViolation("base point outside the certified ball |y| < 3r/2");
  }
  const double alpha = cert_.alpha;
  SolveResult out;
  out.section.y = y;
  out.section.sigma = opt.initial ? *opt.initial : problem_->zero_section();
  if (out.section.sigma.harmonic_norm() != 0.0) throw InvalidInput("initial section has a harmonic part");

  Residual F = problem_->residual_direct(y, out.section.sigma);
  double res = F.norm(alpha);
  out.residual_history.push_back(res);
  while (res > opt.tol) {
    if (out.iterations >= opt.max_iterations) {
      throw Divergence("section iteration did not converge", out.residual_history);
    }
    const TorusForm step = opt.mode == SolveMode::FixedSlope
                               ? apply_frozen_inverse(F)
                               : apply_tangent_inverse(y, out.section.sigma, F);
    out.section.sigma -= step;
    ++out.iterations;
    F = problem_->residual_direct(y, out.section.sigma);
    res = F.norm(alpha);
    out.residual_history.push_back(res);
    if (!std::isfinite(res) || res > 1e6 * std::max(1.0, out.residual_history.front())) {
      throw Divergence("section iteration blew up", out.residual_history);
    }
  }
  out.residual_norm = res;
  out.sigma_norm = c1_alpha_norm(out.section.sigma, alpha);
  if (opt.enforce_budget && out.sigma_norm > cert_.delta) {
    throw BudgetViolation("solved section exceeds the delta budget", out.sigma_norm);
  }
  return out;
}

std::vector<TorusForm> SectionSolver::solution_derivative(const Eigen::VectorXd& y, const TorusForm& sigma) const {
  const int n = problem_->dim();
  std::vector<TorusForm> cols;
  for (int j = 0; j < n; ++j) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    e(j) = 1.0;
    const Residual Fy = problem_->linearize_y(y, sigma, e);
    if (Fy.max_abs() == 0.0) {
      cols.push_back(problem_->zero_section());
      continue;
    }
    TorusForm col = apply_tangent_inverse(y, sigma, Fy);
    col *= -1.0;
    cols.push_back(std::move(col));
  }
  return cols;
}

}  // namespace slagfib
