#pragma once

#include <functional>
#include <vector>

#include "slagfib/dirac.hpp"
#include "slagfib/rng.hpp"

namespace slagfib {

/// Bounded linear map on sections with values in the residual space.
using SectionOperator = std::function<Residual(const TorusForm&)>;

struct NeumannResult {
  TorusForm solution;
  int terms = 0;
  /// Coefficient sup of each series term; geometric with ratio <= contraction.
  std::vector<double> term_sizes;
};

/// Sampled ||D^{-1} V|| in the C^{1,alpha} surrogate norm over random sections.
double measure_contraction(const DiracOperator& D, const SectionOperator& V, Rng& rng, int probes,
                           double alpha = 0.5);

/// Sampled ||(D + V)^{-1}||: max over random sections s of ||s||_{C1a} / ||(D + V) s||_{C0a}.
double sampled_inverse_norm(const DiracOperator& D, const SectionOperator& V, Rng& rng, int probes,
                            double alpha = 0.5);

/// (D + V)^{-1} target = sum_j (-D^{-1} V)^j D^{-1} target, truncated once a
/// term falls below rel_tol times the first. Refuses (SmallnessViolation)
/// unless the supplied contraction estimate is below 1/2.
NeumannResult perturbed_invert(const DiracOperator& D, const SectionOperator& V, const Residual& target,
                               double contraction, double rel_tol = 1e-14, int max_terms = 200,
                               double defect_tol = 1e-9);

}  // namespace slagfib
