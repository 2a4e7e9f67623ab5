#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "slagfib/ambient_form.hpp"
#include "slagfib/lattice.hpp"
#include "slagfib/torus_form.hpp"

namespace slagfib {

/// Product map (x, y) -> (A x + t, B y) on T^n x R^n.
struct GroupElement {
  Eigen::MatrixXd A;
  Eigen::VectorXd t;
  Eigen::MatrixXd B;
};

/// Finite group of product maps, closed under composition. Element 0 is the
/// identity.
class GroupAction {
 public:
  GroupAction() = default;
  GroupAction(Lattice lattice, std::vector<GroupElement> elements, std::string name = "custom");

  static GroupAction trivial(const Lattice& lattice);
  /// Z/2 generated by (x, y) -> (-x, -y).
  static GroupAction flip(const Lattice& lattice);

  const Lattice& lattice() const { return lattice_; }
  const std::string& name() const { return name_; }
  std::size_t size() const { return elements_.size(); }
  const GroupElement& element(std::size_t i) const { return elements_.at(i); }
  const std::vector<GroupElement>& elements() const { return elements_; }
  /// table[i][j] = index of element(i) * element(j) (apply j first).
  const std::vector<std::vector<std::size_t>>& composition_table() const { return table_; }
  std::size_t inverse_of(std::size_t i) const;

 private:
  Lattice lattice_;
  std::vector<GroupElement> elements_;
  std::vector<std::vector<std::size_t>> table_;
  std::string name_;
};

/// A maps the lattice onto itself (integral with integral inverse in lattice coordinates).
bool lattice_compatible(const Lattice& lattice, const GroupElement& g, double tol = 1e-9);
/// Element preserves g = sum dx^2 + dy^2, omega_0 and Omega_0: A orthogonal, B = A, det A = 1.
bool preserves_flat_structure(const GroupElement& g, double tol = 1e-12);

GroupElement compose(const GroupElement& a, const GroupElement& b);  // a after b
GroupElement inverse(const GroupElement& g);

/// Point action on (x, y).
std::pair<Eigen::VectorXd, Eigen::VectorXd> act_on_point(const GroupElement& g, const Eigen::VectorXd& x,
                                                           const Eigen::VectorXd& y);

/// Pullback g^* of an ambient form (exact polynomial expansion).
AmbientForm pull_back(const GroupElement& g, const AmbientForm& form, const Lattice& lattice);
/// Push forward (g^{-1})^* of a torus form along the torus factor x -> A x + t.
TorusForm push_forward(const GroupElement& g, const TorusForm& form);

/// Graph datum transported by g: L(y, sigma) -> L(B y, sigma') with
/// sigma'(x') = B sigma(A^{-1}(x' - t)). Requires B = A orthogonal.
TorusForm act_on_section(const GroupElement& g, const TorusForm& sigma);

/// Group average (1/|G|) sum g^* form.
AmbientForm average(const GroupAction& action, const AmbientForm& form);
/// Largest coefficient change max_g |g^* form - form|.
double invariance_defect(const GroupAction& action, const AmbientForm& form);

}  // namespace slagfib
