#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <iostream>
#include <sstream>

#include "slagfib/comparison.hpp"
#include "slagfib/errors.hpp"
#include "slagfib/fibration.hpp"
#include "slagfib/group_action.hpp"
#include "slagfib/io.hpp"
#include "slagfib/norms.hpp"

#ifndef SLAGFIB_VERSION
#define SLAGFIB_VERSION "unknown"
#endif

namespace slagfib::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

/// A command-level failure with its exit code.
struct Failure : std::runtime_error {
  Failure(int c, const std::string& msg) : std::runtime_error(msg), code(c) {}
  int code;
};

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

fs::path artifact(const Context& ctx, const std::string& suffix) { return ctx.out / (ctx.config.name + suffix); }

json read_summary(const Context& ctx) {
  const fs::path p = ctx.out / "summary.json";
  return fs::exists(p) ? read_json(p) : json::object();
}

// Merges one section into summary.json together with the tool and config
// records, then rewrites the file atomically.
void update_summary(const Context& ctx, const std::string& section, const json& value, double seconds) {
  json s = read_summary(ctx);
  s["tool"] = {{"name", "slagfib"}, {"version", SLAGFIB_VERSION}};
  s["config"] = ctx.config.echo;
  s[section] = value;
  s["timings"][section] = seconds;
  write_atomic(ctx.out / "summary.json", dump(s));
}

void ensure_out(const Context& ctx) {
  std::error_code ec;
  fs::create_directories(ctx.out, ec);
  if (ec) throw Failure(kConfigError, "cannot create output directory " + ctx.out.string() + ": " + ec.message());
}

bool same_lattice(const Lattice& a, const Lattice& b) {
  return a.dim() == b.dim() && (a.basis() - b.basis()).cwiseAbs().maxCoeff() <= 0.0;
}

GeneratedStructure load_structure(const Context& ctx) {
  const fs::path p = artifact(ctx, ".structure");
  if (!fs::exists(p)) throw Failure(kConfigError, "missing " + p.string() + " (run generate first)");
  GeneratedStructure g = structure_from_json(read_json(p));
  const auto& want = ctx.config.recipe;
  const auto& got = g.recipe;
  const bool match = same_lattice(want.lattice, got.lattice) && want.r == got.r && want.epsilon == got.epsilon &&
                     want.seed == got.seed && want.group == got.group && want.potential.band == got.potential.band &&
                     want.potential.decay == got.potential.decay &&
                     want.potential.poly_cap == got.potential.poly_cap && want.phase.scale == got.phase.scale &&
                     want.phase.angle == got.phase.angle;
  if (!match) throw Failure(kConfigError, p.string() + " was generated from a different configuration");
  return g;
}

json certificate_summary(const IFTCertificate& c) {
  json j = certificate_to_json(c);
  j.erase("format");
  return j;
}

IFTCertificate certify_and_record(const Context& ctx, DeformationProblem& problem) {
  Timer t;
  const IFTCertificate cert = certify_hypotheses(problem, ctx.config.certificate);
  write_atomic(artifact(ctx, ".certificate"), dump(certificate_to_json(cert)));
  update_summary(ctx, "certificate", certificate_summary(cert), t.seconds());
  return cert;
}

SolveOptions solve_options(const RunConfig& c) {
  SolveOptions o;
  o.mode = c.mode;
  o.tol = c.solve_tol;
  o.max_iterations = c.max_iterations;
  return o;
}

std::string csv_number(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

json fibration_summary(const Fibration& f) {
  double res_d = 0.0, res_f = 0.0, sig = 0.0, der = 0.0;
  int iters = 0;
  for (const auto& d : f.diagnostics) {
    res_d = std::max(res_d, d.residual_direct);
    res_f = std::max(res_f, d.residual_formula);
    sig = std::max(sig, d.sigma_norm);
    der = std::max(der, d.derivative_norm);
    iters = std::max(iters, d.iterations);
  }
  return json{{"fibers", f.sections.size()},
              {"max_residual_direct", res_d},
              {"max_residual_formula", res_f},
              {"max_sigma_norm", sig},
              {"max_derivative_norm", der},
              {"max_iterations", iters},
              {"continuity_ratio", f.continuity_ratio},
              {"delta", f.delta},
              {"theta", f.theta + 0.0},
              {"a", f.a}};
}

std::vector<std::size_t> pick_fibers(std::size_t total, int wanted) {
  std::vector<std::size_t> idx;
  if (wanted <= 1 || total == 1) {
    idx.push_back(total / 2);
    return idx;
  }
  const std::size_t m = std::min<std::size_t>(static_cast<std::size_t>(wanted), total);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t k = (i * (total - 1) + (m - 1) / 2) / (m - 1);
    if (idx.empty() || idx.back() != k) idx.push_back(k);
  }
  return idx;
}

}  // namespace

int cmd_generate(const Context& ctx) {
  Timer t;
  ensure_out(ctx);
  GeneratedStructure g;
  try {
    g = generate_structure(ctx.config.recipe);
  } catch (const DegenerateStructure& e) {
    throw Failure(kConfigError, std::string("generation refused: ") + e.what());
  }
  write_atomic(artifact(ctx, ".structure"), dump(structure_to_json(g)));
  const json s{{"n", g.structure.dim()},
               {"epsilon", g.structure.epsilon},
               {"seed", g.recipe.seed},
               {"a", g.structure.a},
               {"theta", g.structure.theta + 0.0},
               {"nondegeneracy_ratio", nondegeneracy_ratio(g.structure)}};
  update_summary(ctx, "structure", s, t.seconds());
  std::cout << "structure written: " << artifact(ctx, ".structure").string() << "\n";
  return kSuccess;
}

int cmd_certify(const Context& ctx) {
  ensure_out(ctx);
  const auto g = load_structure(ctx);
  DeformationProblem problem(g.structure, ctx.config.cutoff);
  const auto cert = certify_and_record(ctx, problem);
  std::cout << "hypotheses_ok = " << (cert.hypotheses_ok ? "true" : "false") << " (Cbar " << cert.Cbar
            << ", deviation " << cert.deviation_bound << ", residual " << cert.residual_at_zero << ")\n";
  return cert.hypotheses_ok ? kSuccess : kCertificateFailure;
}

int cmd_solve(const Context& ctx) {
  ensure_out(ctx);
  const auto g = load_structure(ctx);
  DeformationProblem problem(g.structure, ctx.config.cutoff);
  const auto cert = certify_and_record(ctx, problem);
  if (!cert.hypotheses_ok) throw Failure(kCertificateFailure, "certificate hypotheses do not hold");
  Timer t;
  const SectionSolver solver(problem, cert);
  const int n = g.structure.dim();
  std::ostringstream csv;
  for (int i = 0; i < n; ++i) csv << "y" << i + 1 << ",";
  csv << "iterations,residual,sigma_norm\n";
  json rows = json::array();
  for (const auto& y : ctx.config.solve_points) {
    SolveResult r;
    try {
      r = solver.solve(y, solve_options(ctx.config));
    } catch (const Error& e) {
      std::ostringstream where;
      where << y.transpose();
      throw Failure(kSolverFailure, std::string(e.what()) + " at y = (" + where.str() + ")");
    }
    for (int i = 0; i < n; ++i) csv << csv_number(y(i)) << ",";
    csv << r.iterations << "," << csv_number(r.residual_norm) << "," << csv_number(r.sigma_norm) << "\n";
    rows.push_back({{"y", std::vector<double>(y.data(), y.data() + n)},
                    {"iterations", r.iterations},
                    {"residual", r.residual_norm},
                    {"sigma_norm", r.sigma_norm},
                    {"residual_history", r.residual_history}});
  }
  write_atomic(artifact(ctx, ".solve.csv"), csv.str());
  update_summary(ctx, "solve", rows, t.seconds());
  std::cout << "solved " << rows.size() << " base point(s)\n";
  return kSuccess;
}

int cmd_fibrate(const Context& ctx) {
  ensure_out(ctx);
  const auto g = load_structure(ctx);
  DeformationProblem problem(g.structure, ctx.config.cutoff);
  const auto cert = certify_and_record(ctx, problem);
  if (!cert.hypotheses_ok) throw Failure(kCertificateFailure, "certificate hypotheses do not hold");

  Timer t;
  const SectionSolver solver(problem, cert);
  const BaseGrid grid = make_base_grid(g.structure.dim(), ctx.config.grid_points, ctx.config.grid_radius);
  FibrationOptions opt;
  opt.threads = ctx.threads;
  opt.solve = solve_options(ctx.config);
  opt.derivatives = ctx.config.derivatives;
  opt.fiber_tol = ctx.config.fiber_tol;
  const Fibration fib = build_fibration(solver, grid, opt, ctx.config.recipe.seed);
  write_atomic(artifact(ctx, ".fibration"), dump(fibration_to_json(fib)));
  write_atomic(artifact(ctx, ".fibers.csv"), fibration_csv(fib));
  update_summary(ctx, "fibration", fibration_summary(fib), t.seconds());

  Timer te;
  const auto emb = check_embedding(fib, ctx.config.embedding_samples);
  json ej{{"min_jacobian_det", emb.min_jacobian_det},
          {"max_section_slope", emb.max_section_slope},
          {"predicted_det_floor", emb.predicted_det_floor},
          {"min_fiber_separation", emb.min_fiber_separation},
          {"injective", emb.injective}};
  bool equivariant = true;
  if (ctx.config.recipe.group != "none") {
    const GroupAction action = make_group(ctx.config.recipe.group, g.structure.lattice());
    const double defect = check_equivariance(fib, action, g.structure, cert.alpha);
    equivariant = defect <= 1e-9;
    ej["equivariance_defect"] = defect;
    ej["equivariant"] = equivariant;
  }
  update_summary(ctx, "embedding", ej, te.seconds());
  std::cout << fib.sections.size() << " fibers, min Jacobian det " << emb.min_jacobian_det
            << (emb.injective ? ", injective" : ", NOT injective") << "\n";
  if (!emb.injective) return kEmbeddingFailure;
  if (!equivariant) {
    std::cerr << "equivariance defect above 1e-9\n";
    return kEmbeddingFailure;
  }
  return kSuccess;
}

int cmd_verify(const Context& ctx) {
  ensure_out(ctx);
  Timer t;
  const auto g = load_structure(ctx);
  const fs::path fp = artifact(ctx, ".fibration");
  if (!fs::exists(fp)) throw Failure(kConfigError, "missing " + fp.string() + " (run fibrate first)");
  const Fibration fib = fibration_from_json(read_json(fp));
  if (fib.sections.empty()) throw Failure(kConfigError, fp.string() + " holds no fibers");
  const int n = g.structure.dim();
  const Lattice& lattice = g.structure.lattice();
  const AmbientForm cal = calibration_form(g.structure, g.structure.theta);
  const double inj = lattice.injectivity_radius();
  std::vector<double> radii = ctx.config.verify.radii;
  if (radii.empty()) {
    for (double f : {0.1, 0.3, 0.5, 0.7, 0.9}) radii.push_back(f * inj);
  }
  bool ok = true;
  const double tol = ctx.config.comparison_tol;

  std::ostringstream vol;
  vol << "fiber";
  for (int i = 0; i < n; ++i) vol << ",y" << i + 1;
  vol << ",r,measured_volume,model_volume,margin,uncertainty,holds\n";
  std::ostringstream injcsv;
  injcsv << "fiber";
  for (int i = 0; i < n; ++i) injcsv << ",y" << i + 1;
  injcsv << ",injectivity_radius,integral,lhs,rhs,ratio,hypothesis_ok,holds\n";
  json vrows = json::array();
  json irows = json::array();
  double min_margin = std::numeric_limits<double>::infinity();
  for (std::size_t idx : pick_fibers(fib.sections.size(), ctx.config.verify.base_points)) {
    const Eigen::VectorXd& y = fib.grid.points[idx];
    const auto smp = sample_calibrated(cal, y, fib.sections[idx], Eigen::VectorXd::Zero(n),
                                       ctx.config.verify.samples_per_dim);
    std::ostringstream ys;
    for (int i = 0; i < n; ++i) ys << "," << csv_number(y(i));
    for (double r : radii) {
      const auto rep = check_volume_comparison(smp, r, 0.0, tol);
      ok = ok && rep.holds;
      min_margin = std::min(min_margin, rep.margin);
      vol << idx << ys.str() << "," << csv_number(r) << "," << csv_number(rep.measured_volume) << ","
          << csv_number(rep.model_volume) << "," << csv_number(rep.margin) << "," << csv_number(rep.uncertainty)
          << "," << (rep.holds ? "true" : "false") << "\n";
      vrows.push_back({{"fiber", idx}, {"r", r}, {"margin", rep.margin}, {"holds", rep.holds}});
    }
    const auto ib = check_injectivity_bound(lattice, smp);
    // The bound is only asserted where its hypothesis holds.
    if (ib.hypothesis_ok) ok = ok && ib.holds;
    injcsv << idx << ys.str() << "," << csv_number(ib.injectivity_radius) << "," << csv_number(ib.integral) << ","
           << csv_number(ib.lhs) << "," << csv_number(ib.rhs) << "," << csv_number(ib.ratio) << ","
           << (ib.hypothesis_ok ? "true" : "false") << "," << (ib.holds ? "true" : "false") << "\n";
    irows.push_back({{"fiber", idx},
                     {"lhs", ib.lhs},
                     {"rhs", ib.rhs},
                     {"hypothesis_ok", ib.hypothesis_ok},
                     {"holds", ib.holds}});
  }
  write_atomic(artifact(ctx, ".volume.csv"), vol.str());
  write_atomic(artifact(ctx, ".injectivity.csv"), injcsv.str());
  json summary{{"volume_comparison", vrows},
               {"min_volume_margin", min_margin},
               {"injectivity", irows}};

  if (const auto& cs = ctx.config.verify.collapsing) {
    const auto table = collapsing_series(cs->lattice, cs->scales, cs->mc_samples, ctx.config.recipe.seed, ctx.threads);
    std::ostringstream c;
    c << "scale,integral,volume,mc_volume,mc_half_width,normalized\n";
    json rows = json::array();
    for (const auto& r : table.rows) {
      c << csv_number(r.scale) << "," << csv_number(r.integral) << "," << csv_number(r.volume) << ","
        << csv_number(r.mc_volume) << "," << csv_number(r.mc_half_width) << "," << csv_number(r.normalized) << "\n";
      rows.push_back({{"scale", r.scale},
                      {"integral", r.integral},
                      {"volume", r.volume},
                      {"mc_volume", r.mc_volume},
                      {"mc_half_width", r.mc_half_width}});
    }
    write_atomic(artifact(ctx, ".collapsing.csv"), c.str());
    const bool cok = table.monotone && table.cauchy_gap <= 0.02 && table.mc_consistent && table.bishop_gromov_monotone;
    ok = ok && cok;
    summary["collapsing"] = {{"rows", rows},
                             {"monotone", table.monotone},
                             {"cauchy_gap", table.cauchy_gap},
                             {"limit", table.limit},
                             {"mc_consistent", table.mc_consistent},
                             {"bishop_gromov_monotone", table.bishop_gromov_monotone},
                             {"holds", cok}};
  }
  summary["holds"] = ok;
  update_summary(ctx, "verification", summary, t.seconds());
  std::cout << "verification " << (ok ? "passed" : "FAILED") << "\n";
  return ok ? kSuccess : kVerificationFailure;
}

int cmd_report(const Context& ctx) {
  ensure_out(ctx);
  json s = read_summary(ctx);
  if (s.empty()) throw Failure(kConfigError, "no summary.json in " + ctx.out.string() + " (run a pipeline first)");
  // Refresh the sections that have a backing artifact.
  const fs::path cp = artifact(ctx, ".certificate");
  if (fs::exists(cp)) s["certificate"] = certificate_summary(certificate_from_json(read_json(cp)));
  const fs::path fp = artifact(ctx, ".fibration");
  if (fs::exists(fp)) s["fibration"] = fibration_summary(fibration_from_json(read_json(fp)));
  s["tool"] = {{"name", "slagfib"}, {"version", SLAGFIB_VERSION}};
  s["config"] = ctx.config.echo;
  write_atomic(ctx.out / "summary.json", dump(s));

  std::cout << "slagfib " << SLAGFIB_VERSION << " report for '" << ctx.config.name << "'\n";
  for (const char* key : {"structure", "certificate", "fibration", "embedding"}) {
    if (!s.contains(key)) continue;
    std::cout << "[" << key << "]\n";
    for (const auto& [k, v] : s[key].items()) {
      if (!v.is_structured()) std::cout << "  " << k << " = " << v.dump() << "\n";
    }
  }
  if (s.contains("verification")) {
    std::cout << "[verification]\n  holds = " << s["verification"]["holds"].dump() << "\n  min_volume_margin = "
              << s["verification"]["min_volume_margin"].dump() << "\n";
  }
  return kSuccess;
}

namespace {

int code_for_nested(const std::exception& e) {
  try {
    std::rethrow_if_nested(e);
  } catch (const PreconditionViolation&) {
    return kCertificateFailure;
  } catch (const std::exception&) {
    return kSolverFailure;
  }
  return kSolverFailure;
}

}  // namespace

int run_guarded(int (*command)(const Context&), const Context& ctx) {
  try {
    return command(ctx);
  } catch (const Failure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code;
  } catch (const FiberError& e) {
    std::string cause;
    try {
      std::rethrow_if_nested(e);
    } catch (const std::exception& inner) {
      cause = inner.what();
    }
    std::cerr << "error: " << e.what() << (cause.empty() ? "" : ": " + cause) << "\n";
    return code_for_nested(e);
  } catch (const Divergence& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kSolverFailure;
  } catch (const BudgetViolation& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kSolverFailure;
  } catch (const SmallnessViolation& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kSolverFailure;
  } catch (const DomainEscape& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kSolverFailure;
  } catch (const Undersampled& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kVerificationFailure;
  } catch (const PreconditionViolation& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kVerificationFailure;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const json::exception& e) {
    std::cerr << "format error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternalError;
  }
}

}  // namespace slagfib::cli
