#pragma once

#include <optional>

#include "slagfib/rng.hpp"
#include "slagfib/torus_form.hpp"

namespace slagfib {

/// Pair (2-form, function) in the target space of the deformation map. The
/// 2-form part is absent when n = 1.
struct Residual {
  std::optional<TorusForm> first;
  TorusForm second;

  /// Surrogate C^{0,alpha} norm: sum over the two components.
  double norm(double alpha = 0.5) const;
  /// Largest coefficient magnitude over both parts.
  double max_abs() const;
  Residual& operator+=(const Residual& o);
  Residual& operator-=(const Residual& o);
  Residual& operator*=(double s);
  void axpy(double s, const Residual& o);
};

Residual operator+(Residual a, const Residual& b);
Residual operator-(Residual a, const Residual& b);
Residual operator*(double s, Residual a);
Residual zero_residual(const std::shared_ptr<const FourierBasis>& basis);

/// Hodge Dirac operator sigma -> (d sigma, *d* sigma) from zero-mean 1-forms
/// onto (exact 2-forms, zero-mean functions). On exact forms D(df) = (0, -Lap f)
/// with Lap = d^* d >= 0. Every singular value equals |xi_k|.
class DiracOperator {
 public:
  explicit DiracOperator(std::shared_ptr<const FourierBasis> basis);

  const std::shared_ptr<const FourierBasis>& basis() const { return basis_; }
  int dim() const { return basis_->dim(); }

  Residual apply(const TorusForm& sigma) const;
  /// Largest zero-mode coefficient of the target (the part outside the range).
  double projection_defect(const Residual& target) const;
  /// Unique zero-mean solution of D sigma = target after removing the zero
  /// modes; throws ProjectionDefect above `defect_tol`.
  TorusForm invert(const Residual& target, double defect_tol = 1e-9) const;

  /// Smallest |xi| over retained nonzero frequencies.
  double smallest_singular_value() const { return s_min_; }
  /// C_S = max(1 / s_min, sampled surrogate ratio ||D^{-1} w|| / ||w||).
  double elliptic_constant() const { return c_s_; }
  /// Samples `probes` random sections and raises C_S to the worst observed ratio.
  void calibrate_elliptic_constant(Rng& rng, int probes, double alpha = 0.5);
  void set_elliptic_constant(double c) { c_s_ = std::max(c, 1.0 / s_min_); }

 private:
  std::shared_ptr<const FourierBasis> basis_;
  double s_min_ = 0.0;
  double c_s_ = 0.0;
};

/// Random real 1-form with zero harmonic part, coefficients ~ (1+|k|)^{-decay},
/// rescaled to surrogate C^{1,alpha} norm `size`.
TorusForm random_section(const std::shared_ptr<const FourierBasis>& basis, Rng& rng, double size,
                         double decay = 3.0, double alpha = 0.5);

/// Real zero-mean section from a real coordinate vector (cos/sin pairs per
/// half-space mode and component) and back; the dimension is n (M - 1).
std::size_t section_dofs(const FourierBasis& basis);
TorusForm section_from_vector(const std::shared_ptr<const FourierBasis>& basis, const Eigen::VectorXd& v);
Eigen::VectorXd section_to_vector(const TorusForm& sigma);

}  // namespace slagfib
