#pragma once

#include <complex>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "slagfib/exterior.hpp"
#include "slagfib/lattice.hpp"
#include "slagfib/spectral_grid.hpp"

namespace slagfib {

/// Fourier index set |k_i| <= cutoff on a fixed lattice, with wave vectors
/// xi_k = 2 pi B^{-T} k precomputed. Shared between forms of the same space.
class FourierBasis {
 public:
  FourierBasis(Lattice lattice, int cutoff);

  const Lattice& lattice() const { return lattice_; }
  int dim() const { return lattice_.dim(); }
  int cutoff() const { return cutoff_; }
  std::size_t num_modes() const { return num_modes_; }
  std::size_t zero_mode() const { return num_modes_ / 2; }
  std::size_t conjugate_mode(std::size_t i) const { return num_modes_ - 1 - i; }
  std::vector<int> mode(std::size_t index) const;
  std::size_t mode_index(std::span<const int> k) const;
  /// xi_k component a.
  double wave(std::size_t mode, int a) const { return waves_[mode * dim() + a]; }
  double wave_norm2(std::size_t mode) const;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  Lattice lattice_;
  int cutoff_;
  std::size_t num_modes_;
  std::vector<double> waves_;
};

/// Degree-p differential form on the flat torus R^n / Lambda, stored as a
/// dense table of Fourier coefficients per increasing multi-index over the
/// parallel coframe dx_1 .. dx_n.
class TorusForm {
 public:
  TorusForm() = default;
  TorusForm(std::shared_ptr<const FourierBasis> basis, int degree);
  TorusForm(const Lattice& lattice, int cutoff, int degree);

  int dim() const { return basis_->dim(); }
  int degree() const { return degree_; }
  int cutoff() const { return basis_->cutoff(); }
  const Lattice& lattice() const { return basis_->lattice(); }
  const std::shared_ptr<const FourierBasis>& basis() const { return basis_; }
  const std::vector<Mask>& components() const { return masks_of_degree(dim(), degree_); }
  std::size_t num_components() const { return components().size(); }
  std::size_t num_modes() const { return basis_->num_modes(); }

  cplx& at(std::size_t comp, std::size_t mode) { return coeffs_[comp * num_modes() + mode]; }
  const cplx& at(std::size_t comp, std::size_t mode) const { return coeffs_[comp * num_modes() + mode]; }
  std::span<cplx> component(std::size_t comp) {
    return {coeffs_.data() + comp * num_modes(), num_modes()};
  }
  std::span<const cplx> component(std::size_t comp) const {
    return {coeffs_.data() + comp * num_modes(), num_modes()};
  }
  std::vector<cplx>& data() { return coeffs_; }
  const std::vector<cplx>& data() const { return coeffs_; }

  /// Coefficient of exp(i xi_k . x) dx_I; zero outside the cutoff.
  cplx coeff(std::span<const int> k, Mask index) const;
  void set(std::span<const int> k, Mask index, cplx value);

  /// Pointwise values of each component at a Cartesian point x.
  std::vector<cplx> evaluate(const Eigen::VectorXd& x) const;

  TorusForm& operator+=(const TorusForm& o);
  TorusForm& operator-=(const TorusForm& o);
  TorusForm& operator*=(cplx s);
  void axpy(cplx s, const TorusForm& o);

  bool same_space(const TorusForm& o) const;
  double max_abs() const;
  /// L^2 norm from Parseval: covolume * sum |c|^2.
  double l2_norm() const;
  /// Zero out the frequency-0 (harmonic) coefficients.
  void remove_harmonic();
  double harmonic_norm() const;
  /// Largest |c(-k, I) - conj c(k, I)|.
  double reality_defect() const;
  void make_real();
  /// Same coefficients re-expressed with a different cutoff (truncating or
  /// zero-padding).
  TorusForm with_cutoff(int cutoff) const;

  bool operator==(const TorusForm& o) const;

 private:
  std::shared_ptr<const FourierBasis> basis_;
  int degree_ = 0;
  std::vector<cplx> coeffs_;
};

TorusForm operator+(TorusForm a, const TorusForm& b);
TorusForm operator-(TorusForm a, const TorusForm& b);
TorusForm operator*(cplx s, TorusForm a);

/// L^2 pairing covol * sum c_a conj(c_b).
cplx l2_inner(const TorusForm& a, const TorusForm& b);

/// Exterior derivative; exact on coefficients.
TorusForm exterior_derivative(const TorusForm& form);
/// Hodge star of the flat metric, orientation dx_1 ^ ... ^ dx_n.
TorusForm hodge_star(const TorusForm& form);
/// The composite *d* applied literally; on 1-forms this is the divergence.
TorusForm star_d_star(const TorusForm& form);
/// Formal L^2 adjoint d^* = (-1)^{n(p+1)+1} * d *, nonnegative Laplacian d^*d.
TorusForm codifferential(const TorusForm& form);
/// Wedge product evaluated by collocation on `grid` and truncated back to the
/// cutoff; exact up to the cutoff when the grid obeys the 3/2 rule.
TorusForm wedge(const TorusForm& a, const TorusForm& b, const SpectralGrid& grid);

/// Per-component grid values.
std::vector<std::vector<cplx>> to_grid(const TorusForm& form, const SpectralGrid& grid);
/// Per-component grid values of the x_a-derivatives: result[comp][a].
std::vector<std::vector<std::vector<cplx>>> gradient_to_grid(const TorusForm& form,
                                                             const SpectralGrid& grid);
/// Inverse of to_grid with truncation to the basis cutoff.
TorusForm from_grid(std::shared_ptr<const FourierBasis> basis, int degree,
                    const std::vector<std::vector<cplx>>& values, const SpectralGrid& grid);

}  // namespace slagfib
