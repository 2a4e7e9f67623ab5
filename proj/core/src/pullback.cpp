#include "slagfib/pullback.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "slagfib/errors.hpp"

namespace slagfib {

namespace {

void check_sigma(const TorusForm& sigma, const SpectralGrid& grid) {
  if (sigma.degree() != 1) throw InvalidInput("graph section must be a 1-form");
  if (sigma.dim() != grid.dim() || sigma.cutoff() != grid.cutoff()) {
    throw InvalidInput("graph section does not match the spectral grid");
  }
}

}  // namespace

GraphJet make_graph_jet(const Eigen::VectorXd& y, const TorusForm* sigma, const SpectralGrid& grid) {
  const int n = grid.dim();
  if (y.size() != n) throw InvalidInput("base point has wrong dimension");
  GraphJet jet;
  jet.dim = n;
  jet.points = grid.num_points();
  jet.position.assign(jet.points * n, 0.0);
  jet.jacobian.assign(jet.points * n * n, 0.0);
  for (std::size_t g = 0; g < jet.points; ++g) {
    for (int j = 0; j < n; ++j) jet.position[g * n + j] = y(j);
  }
  if (sigma == nullptr) return jet;
  check_sigma(*sigma, grid);
  const auto vals = to_grid(*sigma, grid);
  const auto grads = gradient_to_grid(*sigma, grid);
  for (std::size_t g = 0; g < jet.points; ++g) {
    for (int j = 0; j < n; ++j) {
      jet.position[g * n + j] += vals[j][g].real();
      for (int i = 0; i < n; ++i) jet.jacobian[(g * n + j) * n + i] = grads[j][i][g].real();
    }
  }
  return jet;
}

GraphJet make_variation_jet(const Eigen::VectorXd& y_dot, const TorusForm* sigma_dot,
                            const SpectralGrid& grid) {
  return make_graph_jet(y_dot, sigma_dot, grid);
}

SampledAmbientForm::SampledAmbientForm(const AmbientForm& form, const SpectralGrid& grid)
    : n_(form.dim()), degree_(form.degree()), radius_(form.domain_radius()), grid_(&grid) {
  if (grid.dim() != n_) throw InvalidInput("spectral grid dimension differs from the ambient form");
  const int N = grid.points();
  const std::size_t P = grid.num_points();
  std::map<Mask, std::size_t> group_of;
  for (const auto& [key, c] : form.terms()) {
    auto [it, inserted] = group_of.try_emplace(key.mask, groups_.size());
    if (inserted) {
      Group gr;
      gr.mask = key.mask;
      gr.rows = indices_of(key.mask);
      groups_.push_back(std::move(gr));
    }
    Group& gr = groups_[it->second];
    std::size_t slot = gr.monomials.size();
    for (std::size_t t = 0; t < gr.monomials.size(); ++t) {
      if (gr.monomials[t] == key.m) slot = t;
    }
    if (slot == gr.monomials.size()) {
      gr.monomials.push_back(key.m);
      gr.values.emplace_back(P, cplx{});
    }
    int deg = 0;
    for (int l = 0; l < n_; ++l) deg += key.m[l];
    max_poly_ = std::max(max_poly_, deg);
    // exp(2 pi i k.u) factorizes over axes.
    std::vector<std::vector<cplx>> axis(n_, std::vector<cplx>(N));
    for (int a = 0; a < n_; ++a) {
      for (int g = 0; g < N; ++g) {
        const long idx = ((static_cast<long>(key.k[a]) * g) % N + N) % N;
        const double ang = 2.0 * std::numbers::pi * static_cast<double>(idx) / N;
        axis[a][g] = cplx(std::cos(ang), std::sin(ang));
      }
    }
    auto& dst = gr.values[slot];
    for (std::size_t g = 0; g < P; ++g) {
      std::size_t rem = g;
      cplx ph = c;
      for (int a = n_ - 1; a >= 0; --a) {
        ph *= axis[a][rem % N];
        rem /= N;
      }
      dst[g] += ph;
    }
  }
}

void SampledAmbientForm::pull_back(const GraphJet& jet, const GraphJet* variation,
                                   std::vector<std::vector<cplx>>& value,
                                   std::vector<std::vector<cplx>>* derivative) const {
  const int n = n_;
  const int p = degree_;
  const std::size_t P = grid_->num_points();
  if (jet.points != P || jet.dim != n) throw InvalidInput("graph jet does not match the sampled form");
  const auto& targets = masks_of_degree(n, p);
  value.assign(targets.size(), std::vector<cplx>(P, cplx{}));
  if (derivative) derivative->assign(targets.size(), std::vector<cplx>(P, cplx{}));
  if (p > n) return;

  std::vector<std::vector<int>> target_cols(targets.size());
  for (std::size_t t = 0; t < targets.size(); ++t) target_cols[t] = indices_of(targets[t]);

  const int maxp = max_poly_ + 1;
  std::vector<double> powers(static_cast<std::size_t>(n * (maxp + 1)));
  std::array<double, 64> rows{};
  std::array<double, 64> trows{};
  std::array<double, 64> minor{};

  for (std::size_t g = 0; g < P; ++g) {
    const double* pos = &jet.position[g * n];
    double r2 = 0.0;
    for (int j = 0; j < n; ++j) r2 += pos[j] * pos[j];
    if (!(std::sqrt(r2) < radius_)) {
      const Eigen::VectorXd x = grid_->grid_point_u(g);
      std::vector<double> xs(x.data(), x.data() + n);
      std::ostringstream msg;
      msg << "graph leaves the domain ball of radius " << radius_ << " at lattice coordinates u = (";
      for (int j = 0; j < n; ++j) msg << (j ? ", " : "") << xs[j];
      msg << "), |y + sigma| = " << std::sqrt(r2);
      throw DomainEscape(msg.str(), xs);
    }
    for (int j = 0; j < n; ++j) {
      double v = 1.0;
      for (int e = 0; e <= maxp; ++e) {
        powers[j * (maxp + 1) + e] = v;
        v *= pos[j];
      }
    }
    const double* jac = &jet.jacobian[g * n * n];
    const double* vpos = variation ? &variation->position[g * n] : nullptr;
    const double* vjac = variation ? &variation->jacobian[g * n * n] : nullptr;

    for (const Group& gr : groups_) {
      cplx v{};
      cplx vt{};
      for (std::size_t t = 0; t < gr.monomials.size(); ++t) {
        const auto& m = gr.monomials[t];
        const cplx coef = gr.values[t][g];
        double mono = 1.0;
        for (int l = 0; l < n; ++l) mono *= powers[l * (maxp + 1) + m[l]];
        v += coef * mono;
        if (vpos) {
          double dmono = 0.0;
          for (int l = 0; l < n; ++l) {
            if (m[l] == 0) continue;
            double term = m[l] * powers[l * (maxp + 1) + m[l] - 1] * vpos[l];
            for (int q = 0; q < n; ++q) {
              if (q != l) term *= powers[q * (maxp + 1) + m[q]];
            }
            dmono += term;
          }
          vt += coef * dmono;
        }
      }
      if (v == cplx{} && vt == cplx{}) continue;

      // Pulled-back covectors: dx_a -> e_a, dy_j -> d sigma_j.
      const int k = p;
      for (int r = 0; r < k; ++r) {
        const int a = gr.rows[r];
        for (int i = 0; i < n; ++i) {
          if (a < n) {
            rows[r * n + i] = (i == a) ? 1.0 : 0.0;
            trows[r * n + i] = 0.0;
          } else {
            rows[r * n + i] = jac[(a - n) * n + i];
            trows[r * n + i] = vjac ? vjac[(a - n) * n + i] : 0.0;
          }
        }
      }
      for (std::size_t t = 0; t < targets.size(); ++t) {
        const auto& cols = target_cols[t];
        for (int r = 0; r < k; ++r) {
          for (int c = 0; c < k; ++c) minor[r * k + c] = rows[r * n + cols[c]];
        }
        const double det = small_det(minor.data(), k);
        value[t][g] += v * det;
        if (derivative) {
          double ddet = 0.0;
          for (int rr = 0; rr < k; ++rr) {
            if (gr.rows[rr] < n || !vjac) continue;
            for (int c = 0; c < k; ++c) minor[rr * k + c] = trows[rr * n + cols[c]];
            ddet += small_det(minor.data(), k);
            for (int c = 0; c < k; ++c) minor[rr * k + c] = rows[rr * n + cols[c]];
          }
          (*derivative)[t][g] += vt * det + v * ddet;
        }
      }
    }
  }
}

TorusForm pullback_graph(const AmbientForm& form, const Eigen::VectorXd& y, const TorusForm& sigma,
                         const SpectralGrid& grid) {
  check_sigma(sigma, grid);
  if (form.degree() > form.dim()) throw InvalidInput("pulled-back degree exceeds the torus dimension");
  const SampledAmbientForm sampled(form, grid);
  const GraphJet jet = make_graph_jet(y, &sigma, grid);
  std::vector<std::vector<cplx>> vals;
  sampled.pull_back(jet, nullptr, vals, nullptr);
  return from_grid(sigma.basis(), form.degree(), vals, grid);
}

}  // namespace slagfib
