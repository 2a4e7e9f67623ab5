#pragma once

#include <vector>

#include <Eigen/Dense>

#include "slagfib/ambient_form.hpp"
#include "slagfib/spectral_grid.hpp"
#include "slagfib/torus_form.hpp"

namespace slagfib {

/// Values of the graph map x -> (x, y + sigma(x)) on a collocation grid:
/// positions y + sigma(x_g) and Jacobians d sigma_j / d x_i.
struct GraphJet {
  int dim = 0;
  std::size_t points = 0;
  std::vector<double> position;  // [g * n + j]
  std::vector<double> jacobian;  // [(g * n + j) * n + i] = d sigma_j / d x_i
};

/// Jet of y + sigma on the grid; `sigma` may be null for the zero section.
GraphJet make_graph_jet(const Eigen::VectorXd& y, const TorusForm* sigma, const SpectralGrid& grid);
/// Jet of a variation (y_dot constant, sigma_dot) of the graph.
GraphJet make_variation_jet(const Eigen::VectorXd& y_dot, const TorusForm* sigma_dot,
                            const SpectralGrid& grid);

/// An ambient form with every (mask, monomial) coefficient sampled on the
/// torus collocation grid, ready to be pulled back along many graphs.
class SampledAmbientForm {
 public:
  SampledAmbientForm(const AmbientForm& form, const SpectralGrid& grid);

  int degree() const { return degree_; }
  int dim() const { return n_; }

  /// Pull back along the graph encoded by `jet`; `variation` (optional)
  /// yields the directional derivative in the same pass. Results are complex
  /// grid values per dx multi-index of the form's degree.
  void pull_back(const GraphJet& jet, const GraphJet* variation,
                 std::vector<std::vector<cplx>>& value,
                 std::vector<std::vector<cplx>>* derivative) const;

 private:
  struct Group {
    Mask mask = 0;
    std::vector<int> rows;  // ambient indices of the mask, increasing
    std::vector<std::array<int, kMaxDim>> monomials;
    std::vector<std::vector<cplx>> values;
  };

  int n_ = 0;
  int degree_ = 0;
  int max_poly_ = 0;
  double radius_ = 0.0;
  const SpectralGrid* grid_ = nullptr;
  std::vector<Group> groups_;
};

/// Pull back of an ambient form to the torus along x -> (x, y + sigma(x)),
/// transformed back to Fourier coefficients (truncated at the grid cutoff).
/// Throws DomainEscape when the graph leaves the domain ball.
TorusForm pullback_graph(const AmbientForm& form, const Eigen::VectorXd& y, const TorusForm& sigma,
                         const SpectralGrid& grid);

}  // namespace slagfib
