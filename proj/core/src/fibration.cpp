#include "slagfib/fibration.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "slagfib/errors.hpp"
#include "slagfib/form_io.hpp"
#include "slagfib/norms.hpp"
#include "slagfib/parallel.hpp"

namespace slagfib {

using nlohmann::json;

std::optional<std::size_t> BaseGrid::find(const Eigen::VectorXd& y) const {
  for (std::size_t i = 0; i < points.size(); ++i) {
    if ((points[i] - y).cwiseAbs().maxCoeff() <= 1e-12) return i;
  }
  return std::nullopt;
}

std::vector<std::pair<std::size_t, std::size_t>> BaseGrid::axis_neighbours() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  const std::size_t N = static_cast<std::size_t>(points_per_dim);
  std::size_t stride = 1;
  for (int a = dim - 1; a >= 0; --a) {
    for (std::size_t i = 0; i < points.size(); ++i) {
      if ((i / stride) % N + 1 < N) out.emplace_back(i, i + stride);
    }
    stride *= N;
  }
  return out;
}

BaseGrid make_base_grid(int n, int points_per_dim, double radius) {
  if (n < 1 || points_per_dim < 1 || !(radius >= 0.0)) throw InvalidInput("invalid base grid parameters");
  BaseGrid g;
  g.dim = n;
  g.points_per_dim = points_per_dim;
  g.radius = radius;
  const double h = radius / std::sqrt(static_cast<double>(n));
  g.spacing = points_per_dim > 1 ? 2.0 * h / (points_per_dim - 1) : 0.0;
  std::size_t total = 1;
  for (int a = 0; a < n; ++a) total *= static_cast<std::size_t>(points_per_dim);
  for (std::size_t i = 0; i < total; ++i) {
    Eigen::VectorXd y(n);
    std::size_t rem = i;
    for (int a = n - 1; a >= 0; --a) {
      const auto c = static_cast<int>(rem % points_per_dim);
      rem /= points_per_dim;
      // Symmetric formula so that mirrored points are exact negatives.
      y(a) = points_per_dim > 1 ? h * (2.0 * c - (points_per_dim - 1)) / (points_per_dim - 1) : 0.0;
    }
    g.points.push_back(y);
  }
  return g;
}

bool grid_invariant(const BaseGrid& grid, const GroupAction& action) {
  for (const auto& el : action.elements()) {
    for (const auto& y : grid.points) {
      if (!grid.find(el.B * y)) return false;
    }
  }
  return true;
}

Fibration build_fibration(const SectionSolver& solver, const BaseGrid& grid, const FibrationOptions& opt,
                          std::uint64_t seed) {
  const auto& problem = solver.problem();
  const auto& cert = solver.certificate();
  if (!cert.hypotheses_ok) throw PreconditionViolation("certificate hypotheses do not hold");
  if (grid.dim != problem.dim()) throw InvalidInput("base grid dimension differs from the structure");
  for (const auto& y : grid.points) {
    if (!(y.norm() < cert.base_radius())) throw PreconditionViolation("base grid leaves the ball |y| < 3r/2");
  }
  Fibration f;
  f.grid = grid;
  f.theta = problem.structure().theta;
  f.a = problem.structure().a;
  f.epsilon = problem.structure().epsilon;
  f.seed = seed;
  f.delta = cert.delta;
  const std::size_t N = grid.points.size();
  f.sections.resize(N);
  f.diagnostics.resize(N);
  if (opt.derivatives) f.derivatives.resize(N);

  parallel_for(N, opt.threads, [&](std::size_t i) {
    const Eigen::VectorXd& y = grid.points[i];
    try {
      const SolveResult res = solver.solve(y, opt.solve);
      FiberDiagnostics d;
      d.iterations = res.iterations;
      d.sigma_norm = res.sigma_norm;
      d.sigma_sup = surrogate_norms(res.section.sigma, cert.alpha).sup_norm;
      d.residual_direct = problem.residual_direct(y, res.section.sigma).norm(cert.alpha);
      d.residual_formula = problem.residual_formula(y, res.section.sigma).norm(cert.alpha);
      if (d.residual_direct > opt.fiber_tol || (problem.dim() <= 2 && d.residual_formula > opt.fiber_tol)) {
        throw Divergence("fiber residual above tolerance after convergence",
                         {d.residual_direct, d.residual_formula});
      }
      if (opt.derivatives) {
        f.derivatives[i] = solver.solution_derivative(y, res.section.sigma);
        for (const auto& col : f.derivatives[i]) d.derivative_norm = std::max(d.derivative_norm, c1_alpha_norm(col, cert.alpha));
      }
      f.sections[i] = res.section.sigma;
      f.diagnostics[i] = d;
    } catch (const Error& e) {
      std::ostringstream msg;
      msg << "fiber at y = (";
      for (int a = 0; a < y.size(); ++a) msg << (a ? ", " : "") << y(a);
      msg << ") failed: " << e.what();
      std::throw_with_nested(FiberError(msg.str(), std::vector<double>(y.data(), y.data() + y.size())));
    }
  });

  if (opt.derivatives && grid.spacing > 0.0) {
    for (const auto& [i, j] : grid.axis_neighbours()) {
      const double diff = c1_alpha_norm(f.sections[i] - f.sections[j], cert.alpha);
      const double scale = grid.spacing * std::max(f.diagnostics[i].derivative_norm, f.diagnostics[j].derivative_norm);
      if (scale > 0.0) {
        f.continuity_ratio = std::max(f.continuity_ratio, diff / scale);
      } else if (diff > 0.0) {
        f.continuity_ratio = std::numeric_limits<double>::infinity();
      }
    }
  }
  return f;
}

namespace {

/// Samples of one fiber: torus points (lattice coordinates u), positions y + sigma(x).
struct FiberSamples {
  std::vector<Eigen::VectorXd> x;  // Cartesian torus points
  std::vector<Eigen::VectorXd> p;  // base coordinates
};

}  // namespace

EmbeddingReport check_embedding(const Fibration& fib, int samples) {
  if (fib.sections.empty()) throw InvalidInput("empty fibration");
  const int n = fib.grid.dim;
  const auto& basis = fib.sections.front().basis();
  const Lattice& lattice = basis->lattice();
  const SpectralGrid sg(n, basis->cutoff(), std::max(samples, 2 * basis->cutoff() + 2));
  const std::size_t P = sg.num_points();
  const int S = sg.points();
  EmbeddingReport rep;
  rep.min_jacobian_det = std::numeric_limits<double>::infinity();

  const std::size_t F = fib.sections.size();
  std::vector<std::vector<double>> pos(F, std::vector<double>(P * n));
  for (std::size_t i = 0; i < F; ++i) {
    const auto vals = to_grid(fib.sections[i], sg);
    for (std::size_t g = 0; g < P; ++g) {
      for (int j = 0; j < n; ++j) pos[i][g * n + j] = fib.grid.points[i](j) + vals[j][g].real();
    }
    if (fib.derivatives.empty()) {
      rep.min_jacobian_det = std::min(rep.min_jacobian_det, 1.0);
      continue;
    }
    // cols[i][j] on the grid: d sigma_j / d y_i.
    std::vector<std::vector<std::vector<cplx>>> cols;
    for (int c = 0; c < n; ++c) cols.push_back(to_grid(fib.derivatives[i][c], sg));
    Eigen::MatrixXd J(n, n);
    for (std::size_t g = 0; g < P; ++g) {
      for (int j = 0; j < n; ++j) {
        for (int c = 0; c < n; ++c) {
          const double v = cols[c][j][g].real();
          rep.max_section_slope = std::max(rep.max_section_slope, std::abs(v));
          J(j, c) = (j == c ? 1.0 : 0.0) + v;
        }
      }
      rep.min_jacobian_det = std::min(rep.min_jacobian_det, J.determinant());
    }
  }
  rep.predicted_det_floor = 1.0 - 2.0 * n * rep.max_section_slope;

  // Nearest sampled points between fibers, pruned by |y_i - y_j| - sup_i - sup_j.
  std::vector<double> sup(F, 0.0);
  for (std::size_t i = 0; i < F; ++i) {
    for (std::size_t g = 0; g < P; ++g) {
      double s = 0.0;
      for (int j = 0; j < n; ++j) {
        const double d = pos[i][g * n + j] - fib.grid.points[i](j);
        s += d * d;
      }
      sup[i] = std::max(sup[i], std::sqrt(s));
    }
  }
  std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < F; ++i) {
    for (std::size_t j = i + 1; j < F; ++j) {
      pairs.emplace_back((fib.grid.points[i] - fib.grid.points[j]).norm(), i, j);
    }
  }
  std::sort(pairs.begin(), pairs.end());
  // Torus step lengths along lattice axes, for the search window.
  double hmin = std::numeric_limits<double>::infinity();
  for (int a = 0; a < n; ++a) hmin = std::min(hmin, lattice.basis().col(a).norm() / S);
  std::vector<Eigen::VectorXd> xs(P);
  for (std::size_t g = 0; g < P; ++g) xs[g] = lattice.to_cartesian(sg.grid_point_u(g));

  double best = std::numeric_limits<double>::infinity();
  auto dist = [&](std::size_t i, std::size_t gi, std::size_t j, std::size_t gj) {
    double dy = 0.0;
    for (int a = 0; a < n; ++a) {
      const double d = pos[i][gi * n + a] - pos[j][gj * n + a];
      dy += d * d;
    }
    const double dx = gi == gj ? 0.0 : lattice.torus_distance(xs[gi], xs[gj]);
    return std::sqrt(dx * dx + dy);
  };
  for (const auto& [dy, i, j] : pairs) {
    if (dy - sup[i] - sup[j] >= best) continue;
    for (std::size_t g = 0; g < P; ++g) best = std::min(best, dist(i, g, j, g));
    const int w = std::min(S / 2, static_cast<int>(std::ceil(best / hmin)));
    for (std::size_t g = 0; g < P; ++g) {
      // Window of +-w cells around g in every lattice axis.
      std::vector<int> base(n);
      std::size_t rem = g;
      for (int a = n - 1; a >= 0; --a) {
        base[a] = static_cast<int>(rem % S);
        rem /= S;
      }
      std::vector<int> off(n, -w);
      while (true) {
        std::size_t h = 0;
        for (int a = 0; a < n; ++a) h = h * S + static_cast<std::size_t>(((base[a] + off[a]) % S + S) % S);
        best = std::min(best, dist(i, g, j, h));
        int a = n - 1;
        while (a >= 0 && off[a] == w) off[a--] = -w;
        if (a < 0) break;
        ++off[a];
      }
    }
  }
  rep.min_fiber_separation = F > 1 ? best : std::numeric_limits<double>::infinity();
  rep.injective = rep.min_jacobian_det > 0.0 && rep.min_fiber_separation > 0.0;
  return rep;
}

double check_equivariance(const Fibration& fib, const GroupAction& action, const PerturbedCalabiYau& structure,
                          double alpha) {
  const double inv = std::max(invariance_defect(action, structure.omega_k), invariance_defect(action, structure.Omega_k));
  if (inv > 1e-12) {
    throw PreconditionViolation("structure is not invariant under the group (defect " + std::to_string(inv) + ")");
  }
  for (const auto& el : action.elements()) {
    if (!preserves_flat_structure(el)) throw PreconditionViolation("group element does not preserve the flat structure");
  }
  if (!grid_invariant(fib.grid, action)) throw PreconditionViolation("base grid is not invariant under the group");
  double worst = 0.0;
  for (const auto& el : action.elements()) {
    for (std::size_t i = 0; i < fib.sections.size(); ++i) {
      const std::size_t j = *fib.grid.find(el.B * fib.grid.points[i]);
      worst = std::max(worst, c1_alpha_norm(act_on_section(el, fib.sections[i]) - fib.sections[j], alpha));
    }
  }
  return worst;
}

json fibration_to_json(const Fibration& f) {
  json grid{{"n", f.grid.dim},
            {"points_per_dim", f.grid.points_per_dim},
            {"radius", f.grid.radius},
            {"spacing", f.grid.spacing}};
  json fibers = json::array();
  for (std::size_t i = 0; i < f.sections.size(); ++i) {
    const auto& d = f.diagnostics[i];
    json fj{{"y", std::vector<double>(f.grid.points[i].data(), f.grid.points[i].data() + f.grid.dim)},
            {"sigma", to_json(f.sections[i])},
            {"diagnostics",
             {{"residual_direct", d.residual_direct},
              {"residual_formula", d.residual_formula},
              {"sigma_norm", d.sigma_norm},
              {"sigma_sup", d.sigma_sup},
              {"iterations", d.iterations},
              {"derivative_norm", d.derivative_norm}}}};
    if (!f.derivatives.empty()) {
      json cols = json::array();
      for (const auto& c : f.derivatives[i]) cols.push_back(to_json(c));
      fj["derivative"] = cols;
    }
    fibers.push_back(fj);
  }
  const auto& lattice = f.sections.empty() ? Lattice() : f.sections.front().lattice();
  return json{{"format", "slagfib.fibration/1"},
              {"lattice", f.sections.empty() ? json::array() : lattice_to_json(lattice)},
              {"epsilon", f.epsilon},
              {"seed", f.seed},
              {"theta", f.theta},
              {"a", f.a},
              {"delta", f.delta},
              {"continuity_ratio", f.continuity_ratio},
              {"grid", grid},
              {"fibers", fibers}};
}

Fibration fibration_from_json(const json& j) {
  if (j.value("format", std::string()) != "slagfib.fibration/1") throw InvalidInput("not a fibration record");
  Fibration f;
  f.epsilon = j.at("epsilon").get<double>();
  f.seed = j.at("seed").get<std::uint64_t>();
  f.theta = j.at("theta").get<double>();
  f.a = j.at("a").get<double>();
  f.delta = j.at("delta").get<double>();
  f.continuity_ratio = j.at("continuity_ratio").get<double>();
  const auto& g = j.at("grid");
  f.grid.dim = g.at("n").get<int>();
  f.grid.points_per_dim = g.at("points_per_dim").get<int>();
  f.grid.radius = g.at("radius").get<double>();
  f.grid.spacing = g.at("spacing").get<double>();
  std::shared_ptr<const FourierBasis> basis;
  auto share = [&basis](TorusForm t) {
    // Reuse one basis object for all forms of the same space.
    if (!basis) basis = t.basis();
    if (!(t.lattice() == basis->lattice()) || t.cutoff() != basis->cutoff()) {
      throw InvalidInput("fibers use different Fourier spaces");
    }
    TorusForm out(basis, t.degree());
    out.data() = t.data();
    return out;
  };
  for (const auto& fj : j.at("fibers")) {
    const auto y = fj.at("y").get<std::vector<double>>();
    f.grid.points.push_back(Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size())));
    f.sections.push_back(share(torus_form_from_json(fj.at("sigma"))));
    const auto& d = fj.at("diagnostics");
    FiberDiagnostics diag;
    diag.residual_direct = d.at("residual_direct").get<double>();
    diag.residual_formula = d.at("residual_formula").get<double>();
    diag.sigma_norm = d.at("sigma_norm").get<double>();
    diag.sigma_sup = d.at("sigma_sup").get<double>();
    diag.iterations = d.at("iterations").get<int>();
    diag.derivative_norm = d.at("derivative_norm").get<double>();
    f.diagnostics.push_back(diag);
    if (fj.contains("derivative")) {
      std::vector<TorusForm> cols;
      for (const auto& c : fj["derivative"]) cols.push_back(share(torus_form_from_json(c)));
      f.derivatives.push_back(std::move(cols));
    }
  }
  if (!f.derivatives.empty() && f.derivatives.size() != f.sections.size()) {
    throw InvalidInput("derivative records missing for some fibers");
  }
  return f;
}

std::string fibration_csv(const Fibration& f) {
  std::ostringstream out;
  out << std::setprecision(17);
  for (int a = 0; a < f.grid.dim; ++a) out << "y" << a + 1 << ",";
  out << "sigma_norm,residual_direct,residual_formula,iterations\n";
  for (std::size_t i = 0; i < f.sections.size(); ++i) {
    for (int a = 0; a < f.grid.dim; ++a) out << f.grid.points[i](a) << ",";
    const auto& d = f.diagnostics[i];
    out << d.sigma_norm << "," << d.residual_direct << "," << d.residual_formula << "," << d.iterations << "\n";
  }
  return out.str();
}

}  // namespace slagfib
