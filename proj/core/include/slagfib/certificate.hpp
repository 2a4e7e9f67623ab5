#pragma once

#include <cstdint>
#include <string>

#include "slagfib/deformation.hpp"

namespace slagfib {

struct CertificateOptions {
  double r = 1.0;        // base points are sampled in |y| <= 3r/2
  double delta = 0.2;    // solution radius
  double delta0 = 0.25;  // radius of the section ball for the deviation bound
  int probes = 64;       // random directions per sampled operator norm
  int sigma_samples = 3; // random sections per base sample (besides sigma = 0)
  std::uint64_t seed = 0;
  double alpha = 0.5;
};

/// Measured constants for the quantitative implicit function theorem with
/// A = D_sigma F(0, 0). All operator norms are sampled surrogate norms.
struct IFTCertificate {
  double Cbar = 0.0;              // bound on ||A^{-1}||
  double deviation_bound = 0.0;   // sup ||D_sigma F(y, sigma) - A||
  double residual_at_zero = 0.0;  // sup ||F(y, 0)||
  double delta = 0.0;
  double delta0 = 0.0;
  double r = 0.0;
  bool hypotheses_ok = false;

  double elliptic_constant = 0.0;     // C_S
  double smallest_singular = 0.0;     // s_min of D
  double contraction_at_zero = 0.0;   // ||D^{-1} V(0, 0)||
  double sampled_inverse_norm = 0.0;  // ||(D + V(0,0))^{-1}|| on probes
  /// Bound for ||D^{-1} V(y, sigma)|| on the certified region: q0 + C_S * deviation.
  double contraction_bound = 0.0;
  int probes = 0;
  int base_samples = 0;
  int section_samples = 0;
  std::uint64_t seed = 0;
  std::string rng_name;
  double alpha = 0.5;
  int cutoff = 0;
  int grid_points = 0;
  std::string norm_kind;

  double base_radius() const { return 1.5 * r; }
  /// deviation_bound <= 1/(2 Cbar) and residual_at_zero <= delta/(4 Cbar) and delta < delta0.
  static bool evaluate(double Cbar, double deviation, double residual, double delta, double delta0);
};

IFTCertificate certify_hypotheses(DeformationProblem& problem, const CertificateOptions& options);

/// The operator V(0, 0) of a problem as a SectionOperator.
std::function<Residual(const TorusForm&)> frozen_perturbation(const DeformationProblem& problem);

}  // namespace slagfib
