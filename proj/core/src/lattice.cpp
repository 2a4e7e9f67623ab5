#include "slagfib/lattice.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "slagfib/errors.hpp"
#include "slagfib/exterior.hpp"

namespace slagfib {

namespace {

// Visits every integer vector c with |c_i| <= bound.
template <class F>
void for_each_box_point(int n, int bound, F&& f) {
  std::vector<int> c(n, -bound);
  while (true) {
    f(c);
    int i = n - 1;
    while (i >= 0 && c[i] == bound) {
      c[i] = -bound;
      --i;
    }
    if (i < 0) return;
    ++c[i];
  }
}

double smallest_singular_value(const Eigen::MatrixXd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

}  // namespace

Lattice::Lattice(Eigen::MatrixXd basis) : basis_(std::move(basis)) {
  if (basis_.rows() != basis_.cols() || basis_.rows() < 1 || basis_.rows() > kMaxDim) {
    throw InvalidInput("lattice basis must be square with dimension 1.." + std::to_string(kMaxDim));
  }
  if (!basis_.allFinite()) throw InvalidInput("lattice basis has non-finite entries");
  covolume_ = std::abs(basis_.determinant());
  const double scale = basis_.cwiseAbs().maxCoeff();
  if (!(covolume_ > 1e-12 * std::pow(scale, static_cast<double>(basis_.rows())))) {
    throw InvalidInput("degenerate lattice: covolume is zero");
  }
  inverse_ = basis_.inverse();
  dual_ = 2.0 * std::numbers::pi * inverse_.transpose();
}

Lattice Lattice::cubic(int n, double side) {
  return Lattice(side * Eigen::MatrixXd::Identity(n, n));
}

Lattice Lattice::hexagonal(double side) {
  Eigen::MatrixXd b(2, 2);
  b << side, 0.5 * side, 0.0, 0.5 * std::sqrt(3.0) * side;
  return Lattice(b);
}

Eigen::VectorXd Lattice::wave_vector(std::span<const int> k) const {
  Eigen::VectorXd kv(dim());
  for (int i = 0; i < dim(); ++i) kv(i) = k[i];
  return dual_ * kv;
}

double shortest_nonzero_length(const Eigen::MatrixXd& basis) {
  const int n = static_cast<int>(basis.cols());
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) best = std::min(best, basis.col(i).norm());
  // |B c| >= s_min |c|_2 >= s_min |c|_inf, so candidates satisfy |c|_inf <= best / s_min.
  const double smin = smallest_singular_value(basis);
  const int bound = static_cast<int>(std::floor(best / smin + 1e-9));
  Eigen::VectorXd cv(n);
  for_each_box_point(n, bound, [&](const std::vector<int>& c) {
    bool zero = true;
    for (int i = 0; i < n; ++i) {
      cv(i) = c[i];
      zero = zero && c[i] == 0;
    }
    if (zero) return;
    best = std::min(best, (basis * cv).norm());
  });
  return best;
}

double Lattice::shortest_vector_length() const { return shortest_nonzero_length(basis_); }

double Lattice::shortest_wave_length() const { return shortest_nonzero_length(dual_); }

double Lattice::torus_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
  const int n = dim();
  Eigen::VectorXd u = inverse_ * (a - b);
  for (int i = 0; i < n; ++i) u(i) -= std::round(u(i));
  Eigen::VectorXd d = basis_ * u;
  double best = d.norm();
  const double smin = smallest_singular_value(basis_);
  const int bound = static_cast<int>(std::ceil(best / smin)) + 1;
  Eigen::VectorXd cv(n);
  for_each_box_point(n, std::min(bound, 3), [&](const std::vector<int>& c) {
    for (int i = 0; i < n; ++i) cv(i) = u(i) + c[i];
    best = std::min(best, (basis_ * cv).norm());
  });
  return best;
}

}  // namespace slagfib
