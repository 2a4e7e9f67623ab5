#include "slagfib/spectral_grid.hpp"

#include <cmath>
#include <numbers>

#include "slagfib/errors.hpp"
#include "slagfib/exterior.hpp"

namespace slagfib {

SpectralGrid::SpectralGrid(int n, int cutoff, int points) : n_(n), cutoff_(cutoff), points_(points) {
  if (n < 1 || n > kMaxDim) throw InvalidInput("torus dimension out of range");
  if (cutoff < 0) throw InvalidInput("negative Fourier cutoff");
  if (points <= 2 * cutoff) throw InvalidInput("collocation grid too coarse for cutoff");
  num_modes_ = 1;
  num_points_ = 1;
  for (int i = 0; i < n; ++i) {
    num_modes_ *= static_cast<std::size_t>(modes_per_dim());
    num_points_ *= static_cast<std::size_t>(points);
  }
  const int m = modes_per_dim();
  synth_.resize(points, m);
  analyze_.resize(m, points);
  for (int g = 0; g < points; ++g) {
    for (int j = 0; j < m; ++j) {
      const long k = j - cutoff;
      // Reduce the phase index exactly before converting to an angle.
      const long idx = ((k * g) % points + points) % points;
      const double ang = 2.0 * std::numbers::pi * static_cast<double>(idx) / points;
      synth_(g, j) = cplx(std::cos(ang), std::sin(ang));
      analyze_(j, g) = std::conj(synth_(g, j)) / static_cast<double>(points);
    }
  }
}

int SpectralGrid::dealiased_points(int cutoff) {
  int need = 3 * cutoff + 1;
  if (need % 2) ++need;
  return std::max(32, need);
}

std::vector<int> SpectralGrid::mode(std::size_t index) const {
  std::vector<int> k(n_);
  const std::size_t m = static_cast<std::size_t>(modes_per_dim());
  for (int i = n_ - 1; i >= 0; --i) {
    k[i] = static_cast<int>(index % m) - cutoff_;
    index /= m;
  }
  return k;
}

std::size_t SpectralGrid::mode_index(std::span<const int> k) const {
  std::size_t idx = 0;
  for (int i = 0; i < n_; ++i) {
    if (k[i] < -cutoff_ || k[i] > cutoff_) return npos;
    idx = idx * static_cast<std::size_t>(modes_per_dim()) + static_cast<std::size_t>(k[i] + cutoff_);
  }
  return idx;
}

Eigen::VectorXd SpectralGrid::grid_point_u(std::size_t g) const {
  Eigen::VectorXd u(n_);
  for (int i = n_ - 1; i >= 0; --i) {
    u(i) = static_cast<double>(g % points_) / points_;
    g /= points_;
  }
  return u;
}

void SpectralGrid::apply_axis(std::vector<cplx>& data, std::vector<int>& shape, int axis,
                              const Eigen::MatrixXcd& op) const {
  std::size_t outer = 1;
  std::size_t inner = 1;
  for (int i = 0; i < axis; ++i) outer *= shape[i];
  for (int i = axis + 1; i < n_; ++i) inner *= shape[i];
  const int len_in = shape[axis];
  const int len_out = static_cast<int>(op.rows());
  std::vector<cplx> out(outer * len_out * inner);
  using RowMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  if (inner == 1) {
    // Last axis: one product over all outer rows.
    Eigen::Map<const RowMat> src(data.data(), static_cast<Eigen::Index>(outer), len_in);
    Eigen::Map<RowMat> dst(out.data(), static_cast<Eigen::Index>(outer), len_out);
    dst.noalias() = src * op.transpose();
  } else {
    for (std::size_t o = 0; o < outer; ++o) {
      Eigen::Map<const RowMat> src(data.data() + o * len_in * inner, len_in,
                                   static_cast<Eigen::Index>(inner));
      Eigen::Map<RowMat> dst(out.data() + o * len_out * inner, len_out,
                             static_cast<Eigen::Index>(inner));
      dst.noalias() = op * src;
    }
  }
  data.swap(out);
  shape[axis] = len_out;
}

std::vector<cplx> SpectralGrid::to_grid(std::span<const cplx> coeffs) const {
  if (coeffs.size() != num_modes_) throw InvalidInput("coefficient block has wrong size");
  std::vector<cplx> data(coeffs.begin(), coeffs.end());
  std::vector<int> shape(n_, modes_per_dim());
  for (int a = 0; a < n_; ++a) apply_axis(data, shape, a, synth_);
  return data;
}

std::vector<cplx> SpectralGrid::from_grid(std::span<const cplx> values) const {
  if (values.size() != num_points_) throw InvalidInput("grid block has wrong size");
  std::vector<cplx> data(values.begin(), values.end());
  std::vector<int> shape(n_, points_);
  for (int a = 0; a < n_; ++a) apply_axis(data, shape, a, analyze_);
  return data;
}

}  // namespace slagfib
