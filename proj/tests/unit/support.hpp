#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "slagfib/flat_model.hpp"
#include "slagfib/rng.hpp"
#include "slagfib/torus_form.hpp"

namespace slagfib::testing {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Random form with coefficients decaying like (1 + |k|)^{-decay}. With
/// `dyadic`, coefficients are multiples of 1/8 in [-4, 4] so integer wave
/// vectors keep every product exact.
inline TorusForm random_form(const std::shared_ptr<const FourierBasis>& basis, int degree, Rng& rng,
                             double decay = 2.0, bool dyadic = false) {
  TorusForm f(basis, degree);
  for (std::size_t c = 0; c < f.num_components(); ++c) {
    for (std::size_t m = 0; m < f.num_modes(); ++m) {
      const auto k = basis->mode(m);
      double kn = 0.0;
      for (int v : k) kn += v * v;
      if (dyadic) {
        f.at(c, m) = cplx(rng.uniform_int(-32, 32) / 8.0, rng.uniform_int(-32, 32) / 8.0);
      } else {
        const double amp = std::pow(1.0 + std::sqrt(kn), -decay);
        f.at(c, m) = cplx(rng.normal() * amp, rng.normal() * amp);
      }
    }
  }
  return f;
}

inline TorusForm random_real_form(const std::shared_ptr<const FourierBasis>& basis, int degree, Rng& rng,
                                  double decay = 2.0) {
  auto f = random_form(basis, degree, rng, decay);
  f.make_real();
  return f;
}

/// Direct Fourier sum of component `comp` at Cartesian x, and its gradient.
/// Independent of the library's grid transforms.
struct PointValue {
  cplx value;
  std::vector<cplx> gradient;
};

inline PointValue evaluate_directly(const TorusForm& f, std::size_t comp, const Eigen::VectorXd& x) {
  const auto& basis = *f.basis();
  const int n = f.dim();
  PointValue out{cplx(0.0), std::vector<cplx>(n, cplx(0.0))};
  for (std::size_t m = 0; m < f.num_modes(); ++m) {
    const Eigen::VectorXd xi = basis.lattice().wave_vector(basis.mode(m));
    const cplx e = f.at(comp, m) * std::exp(cplx(0.0, xi.dot(x)));
    out.value += e;
    for (int a = 0; a < n; ++a) out.gradient[a] += cplx(0.0, xi(a)) * e;
  }
  return out;
}

/// Rectangle-rule quadrature of a * conj(b) over the torus on a points^n grid;
/// exact for band-limited integrands when points > 2 * cutoff.
inline cplx quadrature_inner(const TorusForm& a, const TorusForm& b, int points) {
  const int n = a.dim();
  const Lattice& lat = a.lattice();
  std::size_t total = 1;
  for (int i = 0; i < n; ++i) total *= static_cast<std::size_t>(points);
  cplx sum(0.0);
  Eigen::VectorXd u(n);
  for (std::size_t g = 0; g < total; ++g) {
    std::size_t r = g;
    for (int i = n - 1; i >= 0; --i) {
      u(i) = static_cast<double>(r % points) / points;
      r /= points;
    }
    const Eigen::VectorXd x = lat.to_cartesian(u);
    for (std::size_t c = 0; c < a.num_components(); ++c) {
      sum += evaluate_directly(a, c, x).value * std::conj(evaluate_directly(b, c, x).value);
    }
  }
  return sum * lat.covolume() / static_cast<double>(total);
}

inline Eigen::VectorXd random_point(int n, Rng& rng, double scale) {
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x(i) = rng.uniform(-scale, scale);
  return x;
}

}  // namespace slagfib::testing
