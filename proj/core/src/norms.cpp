#include "slagfib/norms.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>

#include "slagfib/errors.hpp"
#include "slagfib/spectral_grid.hpp"

namespace slagfib {

namespace {

// Transform matrices are the expensive part; share grids across calls.
std::shared_ptr<const SpectralGrid> cached_grid(int n, int cutoff, int points) {
  static std::mutex mu;
  static std::map<std::tuple<int, int, int>, std::shared_ptr<const SpectralGrid>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[{n, cutoff, points}];
  if (!slot) slot = std::make_shared<const SpectralGrid>(n, cutoff, points);
  return slot;
}

}  // namespace

NormReport surrogate_norms(const TorusForm& form, double alpha, int points) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidInput("Hoelder exponent must lie in (0, 1)");
  const int n = form.dim();
  points = std::max(points, 2 * form.cutoff() + 2);
  const auto grid = cached_grid(n, form.cutoff(), points);
  const auto vals = to_grid(form, *grid);
  const auto grads = gradient_to_grid(form, *grid);
  const std::size_t P = grid->num_points();
  const std::size_t C = vals.size();

  std::vector<double> mag(P, 0.0);
  std::vector<double> gmag(P, 0.0);
  NormReport rep;
  rep.alpha = alpha;
  for (std::size_t g = 0; g < P; ++g) {
    double s = 0.0;
    double gs = 0.0;
    for (std::size_t c = 0; c < C; ++c) {
      s += std::norm(vals[c][g]);
      for (int a = 0; a < n; ++a) gs += std::norm(grads[c][a][g]);
    }
    rep.sup_norm = std::max(rep.sup_norm, std::sqrt(s));
    rep.grad_sup_norm = std::max(rep.grad_sup_norm, std::sqrt(gs));
  }

  // Axis neighbours; the step along lattice axis a has Cartesian length |B e_a| / N.
  const auto& basis = form.lattice().basis();
  std::size_t stride = 1;
  for (int a = n - 1; a >= 0; --a) {
    const double h = basis.col(a).norm() / points;
    const double scale = std::pow(h, -alpha);
    for (std::size_t g = 0; g < P; ++g) {
      const std::size_t coord = (g / stride) % points;
      const std::size_t nb = coord + 1 < static_cast<std::size_t>(points) ? g + stride
                                                                            : g + stride - points * stride;
      double dv = 0.0;
      double dg = 0.0;
      for (std::size_t c = 0; c < C; ++c) {
        dv += std::norm(vals[c][nb] - vals[c][g]);
        for (int b = 0; b < n; ++b) dg += std::norm(grads[c][b][nb] - grads[c][b][g]);
      }
      rep.value_holder_estimate = std::max(rep.value_holder_estimate, std::sqrt(dv) * scale);
      rep.holder_seminorm_estimate = std::max(rep.holder_seminorm_estimate, std::sqrt(dg) * scale);
    }
    stride *= static_cast<std::size_t>(points);
  }
  return rep;
}

}  // namespace slagfib
