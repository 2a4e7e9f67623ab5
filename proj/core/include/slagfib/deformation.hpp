#pragma once

#include <memory>

#include <Eigen/Dense>

#include "slagfib/dirac.hpp"
#include "slagfib/flat_model.hpp"
#include "slagfib/pullback.hpp"
#include "slagfib/spectral_grid.hpp"

namespace slagfib {

/// Graph datum L(y, sigma) = {(x, y + sigma(x))}; sigma has zero harmonic part.
struct GraphSection {
  Eigen::VectorXd y;
  TorusForm sigma;
};

/// The map F(y, sigma) = (-P^* omega_k, * a^{-1} P^* Im(e^{i theta} Omega_k))
/// for a fixed structure and Fourier cutoff, with its derivatives. P is the
/// graph map x -> (x, y + sigma(x)). F(y, sigma) = 0 iff L(y, sigma) is
/// special Lagrangian of phase theta.
class DeformationProblem {
 public:
  /// grid_points = 0 selects the dealiased default for the cutoff.
  DeformationProblem(const PerturbedCalabiYau& structure, int cutoff, int grid_points = 0);

  const PerturbedCalabiYau& structure() const { return *structure_; }
  const std::shared_ptr<const FourierBasis>& basis() const { return basis_; }
  const SpectralGrid& grid() const { return *grid_; }
  const DiracOperator& dirac() const { return dirac_; }
  DiracOperator& dirac() { return dirac_; }
  int dim() const { return basis_->dim(); }
  int cutoff() const { return basis_->cutoff(); }

  TorusForm zero_section() const { return TorusForm(basis_, 1); }

  /// Genuine pullback of omega_k and the phase-rotated Im Omega_k.
  Residual residual_direct(const Eigen::VectorXd& y, const TorusForm& sigma) const;
  /// (d sigma + P^* d alpha, *d* sigma + * P^* d Im beta). Equal to the
  /// direct residual for n <= 2; for n >= 3 it omits terms of order |d sigma|^2.
  Residual residual_formula(const Eigen::VectorXd& y, const TorusForm& sigma) const;
  /// D_sigma F(y, sigma) applied to sigma_dot.
  Residual linearize_sigma(const Eigen::VectorXd& y, const TorusForm& sigma, const TorusForm& sigma_dot) const;
  /// D_y F(y, sigma) applied to y_dot.
  Residual linearize_y(const Eigen::VectorXd& y, const TorusForm& sigma, const Eigen::VectorXd& y_dot) const;
  /// V(y, sigma) = D_sigma F(y, sigma) - D.
  Residual perturbation(const Eigen::VectorXd& y, const TorusForm& sigma, const TorusForm& sigma_dot) const;

 private:
  std::shared_ptr<const PerturbedCalabiYau> structure_;
  std::shared_ptr<const FourierBasis> basis_;
  std::shared_ptr<const SpectralGrid> grid_;
  DiracOperator dirac_;
  // Direct residual data: omega_k and Im(e^{i theta} Omega_k) / a.
  std::unique_ptr<SampledAmbientForm> omega_;
  std::unique_ptr<SampledAmbientForm> calib_im_;
  // Formula data: d alpha and d Im beta.
  std::unique_ptr<SampledAmbientForm> d_alpha_;
  std::unique_ptr<SampledAmbientForm> d_im_beta_;
};

}  // namespace slagfib
