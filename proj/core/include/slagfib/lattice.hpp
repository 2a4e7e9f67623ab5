#pragma once

#include <Eigen/Dense>
#include <span>

namespace slagfib {

/// Lattice Lambda in R^n given by generator columns; T^n = R^n / Lambda with
/// the flat metric induced by the Euclidean one.
class Lattice {
 public:
  Lattice() = default;
  explicit Lattice(Eigen::MatrixXd basis);

  static Lattice cubic(int n, double side);
  /// Hexagonal lattice in the plane with shortest vector `side`.
  static Lattice hexagonal(double side);

  int dim() const { return static_cast<int>(basis_.rows()); }
  const Eigen::MatrixXd& basis() const { return basis_; }
  /// 2 pi B^{-T}: columns generate the wave vectors of Fourier modes.
  const Eigen::MatrixXd& dual_basis() const { return dual_; }
  const Eigen::MatrixXd& inverse_basis() const { return inverse_; }
  double covolume() const { return covolume_; }

  Eigen::VectorXd wave_vector(std::span<const int> k) const;
  Eigen::VectorXd to_cartesian(const Eigen::VectorXd& u) const { return basis_ * u; }

  double shortest_vector_length() const;
  /// Smallest |xi| over nonzero dual-lattice wave vectors.
  double shortest_wave_length() const;
  /// Flat distance between two points of the torus.
  double torus_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const;
  /// Injectivity radius of the flat torus: half the shortest vector.
  double injectivity_radius() const { return 0.5 * shortest_vector_length(); }

  Lattice scaled(double s) const { return Lattice(s * basis_); }

  bool operator==(const Lattice& other) const { return basis_ == other.basis_; }

 private:
  Eigen::MatrixXd basis_;
  Eigen::MatrixXd inverse_;
  Eigen::MatrixXd dual_;
  double covolume_ = 0.0;
};

/// Length of the shortest nonzero vector B c, c integer, by bounded enumeration.
double shortest_nonzero_length(const Eigen::MatrixXd& basis);

}  // namespace slagfib
