#pragma once

#include "slagfib/torus_form.hpp"

namespace slagfib {

/// Grid surrogates for Hoelder norms of a torus form. Pointwise magnitudes are
/// Euclidean over components (and over derivative directions for gradients).
struct NormReport {
  double sup_norm = 0.0;
  double grad_sup_norm = 0.0;
  /// Hoelder quotient of the gradient at grid scale.
  double holder_seminorm_estimate = 0.0;
  /// Hoelder quotient of the values at grid scale.
  double value_holder_estimate = 0.0;
  double alpha = 0.5;

  /// sup + grad_sup + holder(gradient)
  double c1_alpha() const { return sup_norm + grad_sup_norm + holder_seminorm_estimate; }
  /// sup + holder(values)
  double c0_alpha() const { return sup_norm + value_holder_estimate; }
};

inline constexpr int kDefaultNormPoints = 64;

/// Evaluates the form and its gradient on a points^n grid (band-limited
/// interpolation) and takes maxima. Hoelder quotients use axis neighbours.
NormReport surrogate_norms(const TorusForm& form, double alpha = 0.5,
                           int points = kDefaultNormPoints);

inline double c1_alpha_norm(const TorusForm& f, double alpha = 0.5, int points = kDefaultNormPoints) {
  return surrogate_norms(f, alpha, points).c1_alpha();
}
inline double c0_alpha_norm(const TorusForm& f, double alpha = 0.5, int points = kDefaultNormPoints) {
  return surrogate_norms(f, alpha, points).c0_alpha();
}

}  // namespace slagfib
