#include "slagfib/deformation.hpp"

#include "slagfib/errors.hpp"

namespace slagfib {

DeformationProblem::DeformationProblem(const PerturbedCalabiYau& structure, int cutoff, int grid_points)
    : structure_(std::make_shared<const PerturbedCalabiYau>(structure)),
      basis_(std::make_shared<const FourierBasis>(structure.lattice(), cutoff)),
      grid_(std::make_shared<const SpectralGrid>(structure.dim(), cutoff,
                                                 grid_points > 0 ? grid_points
                                                                 : SpectralGrid::dealiased_points(cutoff))),
      dirac_(basis_) {
  const auto& s = *structure_;
  const int n = s.dim();
  const AmbientForm im_calib = (std::polar(1.0 / s.a, s.theta) * s.Omega_k).imag_part();
  calib_im_ = std::make_unique<SampledAmbientForm>(im_calib, *grid_);
  d_im_beta_ = std::make_unique<SampledAmbientForm>(exterior_derivative(s.beta.imag_part()), *grid_);
  if (n >= 2) {
    omega_ = std::make_unique<SampledAmbientForm>(s.omega_k, *grid_);
    d_alpha_ = std::make_unique<SampledAmbientForm>(exterior_derivative(s.alpha), *grid_);
  }
}

namespace {

TorusForm to_form(const std::shared_ptr<const FourierBasis>& basis, int degree,
                  const std::vector<std::vector<cplx>>& vals, const SpectralGrid& grid) {
  TorusForm f = from_grid(basis, degree, vals, grid);
  f.make_real();
  return f;
}

/// Pullback (or its variation) of a sampled form, converted to coefficients.
TorusForm pulled(const SampledAmbientForm& form, const GraphJet& jet, const GraphJet* variation,
                 const std::shared_ptr<const FourierBasis>& basis, const SpectralGrid& grid) {
  std::vector<std::vector<cplx>> vals;
  std::vector<std::vector<cplx>> dvals;
  form.pull_back(jet, variation, vals, variation ? &dvals : nullptr);
  return to_form(basis, form.degree(), variation ? dvals : vals, grid);
}

void check_inputs(const FourierBasis& basis, const Eigen::VectorXd& y, const TorusForm& sigma) {
  if (y.size() != basis.dim()) throw InvalidInput("base point has wrong dimension");
  if (sigma.degree() != 1 || sigma.basis()->cutoff() != basis.cutoff() ||
      !(sigma.lattice() == basis.lattice())) {
    throw InvalidInput("section does not live in the problem's Fourier space");
  }
}

}  // namespace

Residual DeformationProblem::residual_direct(const Eigen::VectorXd& y, const TorusForm& sigma) const {
  check_inputs(*basis_, y, sigma);
  const GraphJet jet = make_graph_jet(y, &sigma, *grid_);
  Residual r{std::nullopt, hodge_star(pulled(*calib_im_, jet, nullptr, basis_, *grid_))};
  if (omega_) {
    TorusForm w = pulled(*omega_, jet, nullptr, basis_, *grid_);
    w *= -1.0;
    r.first = std::move(w);
  }
  return r;
}

Residual DeformationProblem::residual_formula(const Eigen::VectorXd& y, const TorusForm& sigma) const {
  check_inputs(*basis_, y, sigma);
  const GraphJet jet = make_graph_jet(y, &sigma, *grid_);
  Residual r = dirac_.apply(sigma);
  r.second += hodge_star(pulled(*d_im_beta_, jet, nullptr, basis_, *grid_));
  if (d_alpha_) *r.first += pulled(*d_alpha_, jet, nullptr, basis_, *grid_);
  return r;
}

Residual DeformationProblem::linearize_sigma(const Eigen::VectorXd& y, const TorusForm& sigma,
                                             const TorusForm& sigma_dot) const {
  check_inputs(*basis_, y, sigma);
  check_inputs(*basis_, y, sigma_dot);
  const GraphJet jet = make_graph_jet(y, &sigma, *grid_);
  const GraphJet var = make_variation_jet(Eigen::VectorXd::Zero(dim()), &sigma_dot, *grid_);
  Residual r{std::nullopt, hodge_star(pulled(*calib_im_, jet, &var, basis_, *grid_))};
  if (omega_) {
    TorusForm w = pulled(*omega_, jet, &var, basis_, *grid_);
    w *= -1.0;
    r.first = std::move(w);
  }
  return r;
}

Residual DeformationProblem::linearize_y(const Eigen::VectorXd& y, const TorusForm& sigma,
                                         const Eigen::VectorXd& y_dot) const {
  check_inputs(*basis_, y, sigma);
  if (y_dot.size() != dim()) throw InvalidInput("base direction has wrong dimension");
  const GraphJet jet = make_graph_jet(y, &sigma, *grid_);
  const GraphJet var = make_variation_jet(y_dot, nullptr, *grid_);
  Residual r{std::nullopt, hodge_star(pulled(*calib_im_, jet, &var, basis_, *grid_))};
  if (omega_) {
    TorusForm w = pulled(*omega_, jet, &var, basis_, *grid_);
    w *= -1.0;
    r.first = std::move(w);
  }
  return r;
}

Residual DeformationProblem::perturbation(const Eigen::VectorXd& y, const TorusForm& sigma,
                                          const TorusForm& sigma_dot) const {
  return linearize_sigma(y, sigma, sigma_dot) - dirac_.apply(sigma_dot);
}

}  // namespace slagfib
