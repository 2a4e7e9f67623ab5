#include "slagfib/dirac.hpp"

#include <cmath>
#include <limits>

#include "slagfib/errors.hpp"
#include "slagfib/norms.hpp"

namespace slagfib {

double Residual::norm(double alpha) const {
  double s = c0_alpha_norm(second, alpha);
  if (first) s += c0_alpha_norm(*first, alpha);
  return s;
}

double Residual::max_abs() const {
  double s = second.max_abs();
  if (first) s = std::max(s, first->max_abs());
  return s;
}

Residual& Residual::operator+=(const Residual& o) {
  second += o.second;
  if (first && o.first) *first += *o.first;
  return *this;
}

Residual& Residual::operator-=(const Residual& o) {
  second -= o.second;
  if (first && o.first) *first -= *o.first;
  return *this;
}

Residual& Residual::operator*=(double s) {
  second *= s;
  if (first) *first *= s;
  return *this;
}

void Residual::axpy(double s, const Residual& o) {
  second.axpy(s, o.second);
  if (first && o.first) first->axpy(s, *o.first);
}

Residual operator+(Residual a, const Residual& b) { return a += b; }
Residual operator-(Residual a, const Residual& b) { return a -= b; }
Residual operator*(double s, Residual a) { return a *= s; }

Residual zero_residual(const std::shared_ptr<const FourierBasis>& basis) {
  Residual r{std::nullopt, TorusForm(basis, 0)};
  if (basis->dim() >= 2) r.first = TorusForm(basis, 2);
  return r;
}

DiracOperator::DiracOperator(std::shared_ptr<const FourierBasis> basis) : basis_(std::move(basis)) {
  if (basis_->cutoff() < 1) throw InvalidInput("Dirac operator needs at least one nonzero frequency");
  s_min_ = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < basis_->num_modes(); ++m) {
    if (m == basis_->zero_mode()) continue;
    s_min_ = std::min(s_min_, std::sqrt(basis_->wave_norm2(m)));
  }
  c_s_ = 1.0 / s_min_;
}

Residual DiracOperator::apply(const TorusForm& sigma) const {
  if (sigma.degree() != 1) throw InvalidInput("Dirac operator acts on 1-forms");
  Residual r{std::nullopt, star_d_star(sigma)};
  if (dim() >= 2) r.first = exterior_derivative(sigma);
  return r;
}

double DiracOperator::projection_defect(const Residual& target) const {
  const std::size_t z = basis_->zero_mode();
  double d = std::abs(target.second.at(0, z));
  if (target.first) {
    for (std::size_t c = 0; c < target.first->num_components(); ++c) d = std::max(d, std::abs(target.first->at(c, z)));
  }
  return d;
}

TorusForm DiracOperator::invert(const Residual& target, double defect_tol) const {
  const int n = dim();
  if (target.second.degree() != 0 || (n >= 2 && (!target.first || target.first->degree() != 2))) {
    throw InvalidInput("Dirac target must be a (2-form, function) pair");
  }
  const double defect = projection_defect(target);
  if (defect > defect_tol) {
    throw ProjectionDefect("Dirac target has a harmonic part of size " + std::to_string(defect), defect);
  }
  TorusForm sigma(basis_, 1);
  const std::size_t M = basis_->num_modes();
  // Position of dx_a ^ dx_b (a < b) among 2-form components.
  std::vector<int> pos(static_cast<std::size_t>(n * n), -1);
  if (n >= 2) {
    for (int a = 0; a < n; ++a) {
      for (int b = a + 1; b < n; ++b) pos[a * n + b] = mask_position(n, (Mask{1} << a) | (Mask{1} << b));
    }
  }
  std::vector<cplx> W(static_cast<std::size_t>(n * n));
  for (std::size_t m = 0; m < M; ++m) {
    if (m == basis_->zero_mode()) continue;
    const double xi2 = basis_->wave_norm2(m);
    const cplx f = target.second.at(0, m);
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        cplx w{};
        if (a < b) w = target.first->at(pos[a * n + b], m);
        if (a > b) w = -target.first->at(pos[b * n + a], m);
        W[a * n + b] = w;
      }
    }
    // sigma = -i (xi f + xi^T W) / |xi|^2
    for (int b = 0; b < n; ++b) {
      cplx acc = basis_->wave(m, b) * f;
      for (int a = 0; a < n; ++a) acc += basis_->wave(m, a) * W[a * n + b];
      sigma.at(b, m) = cplx(0.0, -1.0) * acc / xi2;
    }
  }
  return sigma;
}

void DiracOperator::calibrate_elliptic_constant(Rng& rng, int probes, double alpha) {
  for (int p = 0; p < probes; ++p) {
    const TorusForm s = random_section(basis_, rng, 1.0, 2.0 + (p % 3), alpha);
    const double num = c1_alpha_norm(s, alpha);
    const double den = apply(s).norm(alpha);
    if (den > 0.0) c_s_ = std::max(c_s_, num / den);
  }
}

TorusForm random_section(const std::shared_ptr<const FourierBasis>& basis, Rng& rng, double size, double decay,
                         double alpha) {
  const int n = basis->dim();
  TorusForm s(basis, 1);
  const std::size_t M = basis->num_modes();
  for (std::size_t m = basis->zero_mode() + 1; m < M; ++m) {
    const auto k = basis->mode(m);
    double kn = 0.0;
    for (int v : k) kn += v * v;
    const double amp = std::pow(1.0 + std::sqrt(kn), -decay);
    for (int c = 0; c < n; ++c) {
      const cplx v(rng.normal() * amp, rng.normal() * amp);
      s.at(c, m) = v;
      s.at(c, basis->conjugate_mode(m)) = std::conj(v);
    }
  }
  const double norm = c1_alpha_norm(s, alpha);
  if (norm > 0.0) s *= size / norm;
  return s;
}

std::size_t section_dofs(const FourierBasis& basis) {
  return static_cast<std::size_t>(basis.dim()) * (basis.num_modes() - 1);
}

TorusForm section_from_vector(const std::shared_ptr<const FourierBasis>& basis, const Eigen::VectorXd& v) {
  const int n = basis->dim();
  if (static_cast<std::size_t>(v.size()) != section_dofs(*basis)) throw InvalidInput("section vector has wrong size");
  TorusForm s(basis, 1);
  std::size_t i = 0;
  for (std::size_t m = basis->zero_mode() + 1; m < basis->num_modes(); ++m) {
    for (int c = 0; c < n; ++c) {
      const cplx z(v(i), v(i + 1));
      i += 2;
      s.at(c, m) = z;
      s.at(c, basis->conjugate_mode(m)) = std::conj(z);
    }
  }
  return s;
}

Eigen::VectorXd section_to_vector(const TorusForm& sigma) {
  const auto& basis = *sigma.basis();
  Eigen::VectorXd v(static_cast<Eigen::Index>(section_dofs(basis)));
  std::size_t i = 0;
  for (std::size_t m = basis.zero_mode() + 1; m < basis.num_modes(); ++m) {
    for (int c = 0; c < basis.dim(); ++c) {
      v(i) = sigma.at(c, m).real();
      v(i + 1) = sigma.at(c, m).imag();
      i += 2;
    }
  }
  return v;
}

}  // namespace slagfib
