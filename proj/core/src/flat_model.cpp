#include "slagfib/flat_model.hpp"

#include <cmath>
#include <algorithm>
#include <functional>
#include <limits>
#include <numbers>

#include "slagfib/errors.hpp"

namespace slagfib {

namespace {

constexpr double kDegeneracyFloor = 0.5;

Mask bit(int i) { return Mask{1} << i; }

/// Multi-indices with entries in [-band, band], in lexicographic order.
std::vector<std::vector<int>> frequency_box(int n, int band) {
  std::vector<std::vector<int>> out;
  std::vector<int> k(n, -band);
  while (true) {
    out.push_back(k);
    int a = n - 1;
    while (a >= 0 && k[a] == band) k[a--] = -band;
    if (a < 0) break;
    ++k[a];
  }
  return out;
}

std::vector<std::array<int, kMaxDim>> monomials(int n, int cap) {
  std::vector<std::array<int, kMaxDim>> out;
  std::array<int, kMaxDim> m{};
  std::function<void(int, int)> rec = [&](int l, int left) {
    if (l == n) {
      out.push_back(m);
      return;
    }
    for (int e = 0; e <= left; ++e) {
      m[l] = e;
      rec(l + 1, left - e);
    }
    m[l] = 0;
  };
  rec(0, cap);
  return out;
}

bool positive_half(const std::vector<int>& k) {
  for (int v : k) {
    if (v != 0) return v > 0;
  }
  return false;
}

// Root-sum-square of coefficients, each weighted by R^deg of its monomial.
double rms_size(const AmbientForm& f) {
  double s = 0.0;
  const double R = f.domain_radius();
  for (const auto& [key, c] : f.terms()) {
    int deg = 0;
    for (int v : key.m) deg += v;
    s += std::norm(c) * std::pow(R, 2 * deg);
  }
  return std::sqrt(s);
}

}  // namespace

FlatCalabiYau::FlatCalabiYau(Lattice lattice, double r) : lattice_(std::move(lattice)), r_(r) {
  if (!(r > 0.0)) throw InvalidInput("domain radius must be positive");
  const int n = lattice_.dim();
  omega_ = AmbientForm(lattice_, 2, domain_radius());
  for (int j = 0; j < n; ++j) omega_.add_constant(bit(j) | bit(n + j), 1.0);
  Omega_ = AmbientForm(lattice_, 0, domain_radius());
  Omega_.add_constant(0, 1.0);
  for (int j = 0; j < n; ++j) {
    AmbientForm factor(lattice_, 1, domain_radius());
    factor.add_constant(bit(j), 1.0);
    factor.add_constant(bit(n + j), cplx(0.0, 1.0));
    Omega_ = wedge(Omega_, factor);
  }
}

FlatCalabiYau build_flat_structure(int n, const Lattice& lattice, double r) {
  if (lattice.dim() != n) throw InvalidInput("lattice dimension differs from n");
  return FlatCalabiYau(lattice, r);
}

Potentials sample_potentials(const FlatCalabiYau& base, const PotentialSpec& spec, Rng& rng) {
  const int n = base.dim();
  if (spec.band < 0 || spec.poly_cap < 0) throw InvalidInput("potential band and polynomial cap must be >= 0");
  const double R = base.domain_radius();
  const auto ks = frequency_box(n, spec.band);
  const auto ms = monomials(n, spec.poly_cap);
  auto amplitude = [&](const std::vector<int>& k, const std::array<int, kMaxDim>& m) {
    double kn = 0.0;
    for (int v : k) kn += v * v;
    int deg = 0;
    for (int l = 0; l < n; ++l) deg += m[l];
    return std::pow(1.0 + std::sqrt(kn), -spec.decay) * std::pow(1.0 / R, deg);
  };

  Potentials out{AmbientForm(base.lattice(), 1, R), AmbientForm(base.lattice(), n - 1, R)};
  // alpha: real, so draw one half of the frequencies and mirror with conjugates.
  for (const auto& k : ks) {
    const bool zero = std::all_of(k.begin(), k.end(), [](int v) { return v == 0; });
    if (!zero && !positive_half(k)) continue;
    for (const auto& m : ms) {
      for (Mask mask : masks_of_degree(2 * n, 1)) {
        const double amp = amplitude(k, m);
        cplx c(rng.normal() * amp, zero ? 0.0 : rng.normal() * amp);
        TermKey key;
        std::copy(k.begin(), k.end(), key.k.begin());
        key.m = m;
        key.mask = mask;
        out.alpha.add(key, c);
        if (!zero) {
          for (int a = 0; a < n; ++a) key.k[a] = -k[a];
          out.alpha.add(key, std::conj(c));
        }
      }
    }
  }
  for (const auto& k : ks) {
    for (const auto& m : ms) {
      for (Mask mask : masks_of_degree(2 * n, n - 1)) {
        const double amp = amplitude(k, m);
        TermKey key;
        std::copy(k.begin(), k.end(), key.k.begin());
        key.m = m;
        key.mask = mask;
        out.beta.add(key, cplx(rng.normal() * amp, rng.normal() * amp));
      }
    }
  }
  const double sa = rms_size(out.alpha);
  const double sb = rms_size(out.beta);
  if (sa > 0.0) out.alpha *= cplx(1.0 / sa, 0.0);
  if (sb > 0.0) out.beta *= cplx(1.0 / sb, 0.0);
  return out;
}

Potentials average_potentials(const Potentials& p, const GroupAction& action) {
  return {average(action, p.alpha), average(action, p.beta)};
}

cplx zero_section_period(const AmbientForm& form) {
  const int n = form.dim();
  if (form.degree() != n) throw InvalidInput("periods over the fiber need an n-form");
  TermKey key;
  key.mask = (Mask{1} << n) - 1;
  return form.coefficient(key) * form.lattice().covolume();
}

std::pair<double, double> phase_normalize(const AmbientForm& Omega_pert) {
  const cplx period = zero_section_period(Omega_pert);
  const double ref = Omega_pert.lattice().covolume();
  const double a = std::abs(period) / ref;
  if (!(a > 1e-14)) throw VanishingPeriod("period of Omega over the zero section vanishes");
  double theta = -std::arg(period / ref);
  if (theta <= -std::numbers::pi) theta += 2.0 * std::numbers::pi;
  return {a, theta};
}

double nondegeneracy_ratio(const PerturbedCalabiYau& s, int torus_points) {
  const int n = s.dim();
  const double R = s.base.domain_radius();
  // y samples: origin and +-0.9 R along each axis and diagonal corners.
  std::vector<Eigen::VectorXd> ys{Eigen::VectorXd::Zero(n)};
  for (int j = 0; j < n; ++j) {
    for (double sgn : {-1.0, 1.0}) {
      Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
      y(j) = sgn * 0.9 * R;
      ys.push_back(y);
    }
  }
  ys.push_back(Eigen::VectorXd::Constant(n, 0.9 * R / std::sqrt(double(n))));
  ys.push_back(Eigen::VectorXd::Constant(n, -0.9 * R / std::sqrt(double(n))));

  const std::size_t total = static_cast<std::size_t>(std::pow(torus_points, n));
  double worst = std::numeric_limits<double>::infinity();
  const int top = 2 * n;
  for (std::size_t g = 0; g < total; ++g) {
    Eigen::VectorXd u(n);
    std::size_t rem = g;
    for (int a = n - 1; a >= 0; --a) {
      u(a) = static_cast<double>(rem % torus_points) / torus_points;
      rem /= torus_points;
    }
    const Eigen::VectorXd x = s.lattice().to_cartesian(u);
    for (const auto& y : ys) {
      const auto w = s.omega_k.evaluate(x, y);
      std::vector<cplx> wn = w;
      for (int p = 1; p < n; ++p) wn = wedge_pointwise(top, 2 * p, wn, 2, w);
      const auto Om = s.Omega_k.evaluate(x, y);
      std::vector<cplx> Omc(Om.size());
      for (std::size_t i = 0; i < Om.size(); ++i) Omc[i] = std::conj(Om[i]);
      const auto vol = wedge_pointwise(top, n, Om, n, Omc);
      // Flat values: omega^n = n! (-1)^{n(n-1)/2} dv, |Omega ^ conj Omega| = 2^n dv.
      double fact = 1.0;
      for (int p = 2; p <= n; ++p) fact *= p;
      const double rw = std::abs(wn[0]) / fact;
      const double rO = std::abs(vol[0]) / (std::pow(2.0, n) * s.a * s.a);
      worst = std::min({worst, rw, rO});
    }
  }
  return worst;
}

PerturbedCalabiYau perturb_structure(const FlatCalabiYau& base, const AmbientForm& alpha,
                                     const AmbientForm& beta, double epsilon, PhaseSpec phase) {
  const int n = base.dim();
  if (!(epsilon >= 0.0)) throw InvalidInput("epsilon must be non-negative");
  if (!(phase.scale > 0.0)) throw InvalidInput("phase scale must be positive");
  if (alpha.degree() != 1 || beta.degree() != n - 1) throw InvalidInput("potential degrees must be 1 and n-1");
  if (!(alpha.lattice() == base.lattice()) || !(beta.lattice() == base.lattice())) {
    throw InvalidInput("potentials live on a different lattice");
  }
  if (alpha.reality_defect() > 1e-12 * std::max(1.0, alpha.max_abs())) {
    throw InvalidInput("alpha must be a real form");
  }
  PerturbedCalabiYau s;
  s.base = base;
  s.epsilon = epsilon;
  s.alpha = AmbientForm(base.lattice(), 1, base.domain_radius());
  s.beta = AmbientForm(base.lattice(), n - 1, base.domain_radius());
  if (epsilon > 0.0) {
    for (const auto& [k, c] : alpha.terms()) s.alpha.add(k, epsilon * c);
    for (const auto& [k, c] : beta.terms()) s.beta.add(k, epsilon * c);
  }
  s.omega_k = base.omega() - exterior_derivative(s.alpha);
  const AmbientForm raw = base.Omega() + exterior_derivative(s.beta);
  const cplx rot = std::polar(phase.scale, -phase.angle);
  const auto [a, theta] = phase_normalize(rot * raw);
  s.a = a;
  s.theta = theta;
  s.Omega_k = std::polar(a, -theta) * raw;
  if (!s.is_flat()) {
    const double ratio = nondegeneracy_ratio(s);
    if (ratio < kDegeneracyFloor) {
      throw DegenerateStructure("perturbed structure degenerates: nondegeneracy ratio " + std::to_string(ratio) +
                                " below " + std::to_string(kDegeneracyFloor));
    }
  }
  return s;
}

PerturbedCalabiYau flat_perturbed(const FlatCalabiYau& base) {
  return perturb_structure(base, AmbientForm(base.lattice(), 1, base.domain_radius()),
                           AmbientForm(base.lattice(), base.dim() - 1, base.domain_radius()), 0.0);
}

AmbientForm calibration_form(const PerturbedCalabiYau& s, double theta) {
  return (std::polar(1.0, theta) * s.Omega_k).real_part();
}

AmbientForm kahler_calibration(const AmbientForm& omega) {
  const int n = omega.dim();
  AmbientForm acc = omega;
  double fact = 1.0;
  for (int p = 2; p <= n; ++p) {
    acc = wedge(acc, omega);
    fact *= p;
  }
  acc *= cplx(1.0 / fact, 0.0);
  return acc;
}

GroupAction make_group(const std::string& name, const Lattice& lattice) {
  if (name == "none") return GroupAction::trivial(lattice);
  if (name == "flip") return GroupAction::flip(lattice);
  throw InvalidInput("unknown group '" + name + "' (expected none or flip)");
}

GeneratedStructure generate_structure(const StructureRecipe& recipe) {
  GeneratedStructure g;
  g.recipe = recipe;
  const FlatCalabiYau base(recipe.lattice, recipe.r);
  const GroupAction action = make_group(recipe.group, recipe.lattice);
  Rng rng(recipe.seed, 0);
  g.potentials = sample_potentials(base, recipe.potential, rng);
  if (action.size() > 1) g.potentials = average_potentials(g.potentials, action);
  g.structure = perturb_structure(base, g.potentials.alpha, g.potentials.beta, recipe.epsilon, recipe.phase);
  return g;
}

}  // namespace slagfib
