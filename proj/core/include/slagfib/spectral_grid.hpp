#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace slagfib {

using cplx = std::complex<double>;

/// Fourier modes |k_i| <= cutoff on T^n together with an N^n collocation grid
/// in lattice coordinates u in [0,1)^n. Mode k has the phase exp(2 pi i k.u).
///
/// Mode storage is row-major over (k_0 + K, ..., k_{n-1} + K); grid storage is
/// row-major over (g_0, ..., g_{n-1}).
class SpectralGrid {
 public:
  SpectralGrid(int n, int cutoff, int points);

  /// Smallest even point count obeying the 3/2 rule for cutoff K, and at
  /// least 32 per dimension.
  static int dealiased_points(int cutoff);

  int dim() const { return n_; }
  int cutoff() const { return cutoff_; }
  int points() const { return points_; }
  int modes_per_dim() const { return 2 * cutoff_ + 1; }
  std::size_t num_modes() const { return num_modes_; }
  std::size_t num_points() const { return num_points_; }

  std::vector<int> mode(std::size_t index) const;
  /// Index of mode k, or npos when outside the cutoff box.
  std::size_t mode_index(std::span<const int> k) const;
  std::size_t zero_mode() const { return num_modes_ / 2; }
  std::size_t conjugate_mode(std::size_t index) const { return num_modes_ - 1 - index; }
  Eigen::VectorXd grid_point_u(std::size_t g) const;

  /// Band-limited series -> values on the collocation grid.
  std::vector<cplx> to_grid(std::span<const cplx> coeffs) const;
  /// Grid values -> Fourier coefficients truncated to the cutoff.
  std::vector<cplx> from_grid(std::span<const cplx> values) const;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  void apply_axis(std::vector<cplx>& data, std::vector<int>& shape, int axis,
                  const Eigen::MatrixXcd& op) const;

  int n_;
  int cutoff_;
  int points_;
  std::size_t num_modes_;
  std::size_t num_points_;
  Eigen::MatrixXcd synth_;    // points x modes: exp(2 pi i g k / N)
  Eigen::MatrixXcd analyze_;  // modes x points: exp(-2 pi i g k / N) / N
};

}  // namespace slagfib
