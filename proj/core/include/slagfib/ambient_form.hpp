#pragma once

#include <array>
#include <compare>
#include <complex>
#include <map>
#include <vector>

#include <Eigen/Dense>

#include "slagfib/exterior.hpp"
#include "slagfib/lattice.hpp"

namespace slagfib {

using cplx = std::complex<double>;

/// One basis element c * exp(i xi_k . x) * y^m * dz_I of an ambient form.
/// Index bits 0..n-1 of `mask` are dx_1..dx_n, bits n..2n-1 are dy_1..dy_n.
struct TermKey {
  std::array<int, kMaxDim> k{};
  std::array<int, kMaxDim> m{};
  Mask mask = 0;
  auto operator<=>(const TermKey&) const = default;
};

/// Differential form on T^n x B(0, R): trigonometric polynomial in the torus
/// coordinates, polynomial in the base coordinates. Exterior derivative and
/// wedge are exact on this representation.
class AmbientForm {
 public:
  AmbientForm() = default;
  AmbientForm(Lattice lattice, int degree, double domain_radius);

  int dim() const { return lattice_.dim(); }
  int degree() const { return degree_; }
  const Lattice& lattice() const { return lattice_; }
  double domain_radius() const { return radius_; }
  const std::map<TermKey, cplx>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  void add(const TermKey& key, cplx value);
  /// Adds a constant-coefficient basis element.
  void add_constant(Mask mask, cplx value);
  cplx coefficient(const TermKey& key) const;

  /// Coefficients on masks_of_degree(2n, degree) at the point (x, y).
  std::vector<cplx> evaluate(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;

  int max_poly_degree() const;
  int max_frequency() const;
  /// Largest |c(-k, m, I) - conj c(k, m, I)|; zero for real forms.
  double reality_defect() const;

  AmbientForm& operator+=(const AmbientForm& o);
  AmbientForm& operator-=(const AmbientForm& o);
  AmbientForm& operator*=(cplx s);

  AmbientForm conjugate() const;
  AmbientForm real_part() const;
  AmbientForm imag_part() const;
  /// Drops terms with |c| <= tol.
  void prune(double tol = 0.0);
  /// Largest coefficient difference against another form of the same shape.
  double max_abs_difference(const AmbientForm& o) const;
  double max_abs() const;

 private:
  void check_compatible(const AmbientForm& o) const;

  Lattice lattice_;
  int degree_ = 0;
  double radius_ = 0.0;
  std::map<TermKey, cplx> terms_;
};

AmbientForm operator+(AmbientForm a, const AmbientForm& b);
AmbientForm operator-(AmbientForm a, const AmbientForm& b);
AmbientForm operator*(cplx s, AmbientForm a);

AmbientForm exterior_derivative(const AmbientForm& form);
AmbientForm wedge(const AmbientForm& a, const AmbientForm& b);

/// Pointwise exterior algebra on coefficient vectors indexed by
/// masks_of_degree(dim, degree).
std::vector<cplx> wedge_pointwise(int dim, int deg_a, const std::vector<cplx>& a, int deg_b,
                                  const std::vector<cplx>& b);

}  // namespace slagfib
