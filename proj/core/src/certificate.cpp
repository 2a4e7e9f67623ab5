#include "slagfib/certificate.hpp"

#include <cmath>
#include <limits>

#include "slagfib/errors.hpp"
#include "slagfib/neumann.hpp"
#include "slagfib/norms.hpp"

namespace slagfib {

namespace {

/// Deterministic base samples: origin, +-axes and diagonals on the sphere of
/// radius R, then uniform random points in the ball.
std::vector<Eigen::VectorXd> base_samples(int n, double R, Rng& rng, int extra) {
  std::vector<Eigen::VectorXd> ys{Eigen::VectorXd::Zero(n)};
  for (int j = 0; j < n; ++j) {
    for (double s : {-1.0, 1.0}) {
      Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
      y(j) = s * R;
      ys.push_back(y);
    }
  }
  for (double s : {-1.0, 1.0}) ys.push_back(Eigen::VectorXd::Constant(n, s * R / std::sqrt(double(n))));
  for (int i = 0; i < extra; ++i) {
    Eigen::VectorXd y(n);
    do {
      for (int j = 0; j < n; ++j) y(j) = rng.uniform(-R, R);
    } while (y.norm() > R);
    ys.push_back(y);
  }
  return ys;
}

}  // namespace

bool IFTCertificate::evaluate(double Cbar, double deviation, double residual, double delta, double delta0) {
  if (!std::isfinite(Cbar) || Cbar <= 0.0) return false;
  return deviation <= 1.0 / (2.0 * Cbar) && residual <= delta / (4.0 * Cbar) && delta < delta0;
}

std::function<Residual(const TorusForm&)> frozen_perturbation(const DeformationProblem& problem) {
  if (problem.structure().is_flat()) return {};
  const Eigen::VectorXd y0 = Eigen::VectorXd::Zero(problem.dim());
  const TorusForm s0 = problem.zero_section();
  return [&problem, y0, s0](const TorusForm& d) { return problem.perturbation(y0, s0, d); };
}

IFTCertificate certify_hypotheses(DeformationProblem& problem, const CertificateOptions& opt) {
  if (!(opt.r > 0.0) || !(opt.delta > 0.0) || !(opt.delta0 > 0.0) || opt.probes < 1) {
    throw InvalidInput("certificate radii must be positive and probes >= 1");
  }
  const int n = problem.dim();
  IFTCertificate c;
  c.delta = opt.delta;
  c.delta0 = opt.delta0;
  c.r = opt.r;
  c.probes = opt.probes;
  c.seed = opt.seed;
  c.rng_name = std::string(Rng::kName);
  c.alpha = opt.alpha;
  c.cutoff = problem.cutoff();
  c.grid_points = problem.grid().points();
  c.norm_kind = "grid surrogate: C1a = sup + grad sup + Hoelder(grad), C0a = sup + Hoelder(values)";

  Rng rng_cs(opt.seed, 1);
  problem.dirac().calibrate_elliptic_constant(rng_cs, opt.probes, opt.alpha);
  const DiracOperator& D = problem.dirac();
  c.elliptic_constant = D.elliptic_constant();
  c.smallest_singular = D.smallest_singular_value();

  Rng rng_base(opt.seed, 2);
  const auto ys = base_samples(n, c.base_radius(), rng_base, 2 * n);
  c.base_samples = static_cast<int>(ys.size());

  if (problem.structure().is_flat()) {
    // F(y, 0) = 0 and D_sigma F(y, sigma) - D is the nonlinear flat term, which vanishes for n <= 2.
    c.Cbar = c.elliptic_constant;
    c.sampled_inverse_norm = 0.0;
    c.contraction_at_zero = 0.0;
    double res = 0.0;
    for (const auto& y : ys) res = std::max(res, problem.residual_direct(y, problem.zero_section()).norm(opt.alpha));
    c.residual_at_zero = res;
  } else {
    const auto V0 = frozen_perturbation(problem);
    Rng rng_q(opt.seed, 3);
    c.contraction_at_zero = measure_contraction(D, V0, rng_q, opt.probes, opt.alpha);
    Rng rng_inv(opt.seed, 4);
    c.sampled_inverse_norm = sampled_inverse_norm(D, V0, rng_inv, opt.probes, opt.alpha);
    c.Cbar = c.contraction_at_zero < 1.0
                 ? std::max(c.elliptic_constant / (1.0 - c.contraction_at_zero), c.sampled_inverse_norm)
                 : std::numeric_limits<double>::infinity();
    double res = 0.0;
    for (const auto& y : ys) res = std::max(res, problem.residual_direct(y, problem.zero_section()).norm(opt.alpha));
    c.residual_at_zero = res;
  }

  // Deviation ||D_sigma F(y, sigma) - D_sigma F(0, 0)|| over (y, sigma) samples.
  Rng rng_sig(opt.seed, 5);
  Rng rng_dir(opt.seed, 6);
  std::vector<TorusForm> dirs;
  for (int p = 0; p < opt.probes; ++p) dirs.push_back(random_section(problem.basis(), rng_dir, 1.0, 2.0 + (p % 3), opt.alpha));
  std::vector<Residual> base_images;
  const Eigen::VectorXd y0 = Eigen::VectorXd::Zero(n);
  for (const auto& d : dirs) base_images.push_back(problem.linearize_sigma(y0, problem.zero_section(), d));
  double dev = 0.0;
  int section_count = 0;
  for (const auto& y : ys) {
    std::vector<TorusForm> sigmas{problem.zero_section()};
    for (int s = 0; s < opt.sigma_samples; ++s) {
      sigmas.push_back(random_section(problem.basis(), rng_sig, opt.delta0, 2.0 + s % 3, opt.alpha));
    }
    for (const auto& sigma : sigmas) {
      ++section_count;
      for (std::size_t p = 0; p < dirs.size(); ++p) {
        const Residual diff = problem.linearize_sigma(y, sigma, dirs[p]) - base_images[p];
        dev = std::max(dev, diff.norm(opt.alpha));
      }
    }
  }
  c.deviation_bound = dev;
  c.section_samples = section_count;
  c.contraction_bound = c.contraction_at_zero + c.elliptic_constant * dev;
  c.hypotheses_ok = IFTCertificate::evaluate(c.Cbar, c.deviation_bound, c.residual_at_zero, c.delta, c.delta0);
  return c;
}

}  // namespace slagfib
