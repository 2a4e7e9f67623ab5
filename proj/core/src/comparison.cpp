#include "slagfib/comparison.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "slagfib/errors.hpp"
#include "slagfib/exterior.hpp"
#include "slagfib/parallel.hpp"
#include "slagfib/rng.hpp"
#include "slagfib/spectral_grid.hpp"

namespace slagfib {

namespace {

constexpr double kPi = std::numbers::pi;

/// Theta(frame) = sum_I Theta_I det(frame[I, :]) for a 2n x n frame.
double evaluate_on_frame(const std::vector<cplx>& theta, int n, const Eigen::MatrixXd& frame) {
  const auto& masks = masks_of_degree(2 * n, n);
  double acc = 0.0;
  std::vector<double> minor(static_cast<std::size_t>(n * n));
  for (std::size_t i = 0; i < masks.size(); ++i) {
    const double c = theta[i].real();
    if (c == 0.0) continue;
    const auto rows = indices_of(masks[i]);
    for (int r = 0; r < n; ++r) {
      for (int q = 0; q < n; ++q) minor[r * n + q] = frame(rows[r], q);
    }
    acc += c * small_det(minor.data(), n);
  }
  return acc;
}

/// sigma and its Cartesian gradient at an arbitrary torus point.
void section_jet(const TorusForm& sigma, const Eigen::VectorXd& x, Eigen::VectorXd& val, Eigen::MatrixXd& grad) {
  const int n = sigma.dim();
  const auto& basis = *sigma.basis();
  val = Eigen::VectorXd::Zero(n);
  grad = Eigen::MatrixXd::Zero(n, n);  // grad(j, i) = d sigma_j / d x_i
  for (std::size_t m = 0; m < basis.num_modes(); ++m) {
    double phase = 0.0;
    for (int a = 0; a < n; ++a) phase += basis.wave(m, a) * x(a);
    const cplx e = std::polar(1.0, phase);
    for (int j = 0; j < n; ++j) {
      const cplx c = sigma.at(j, m);
      if (c == cplx{}) continue;
      const cplx v = c * e;
      val(j) += v.real();
      for (int i = 0; i < n; ++i) grad(j, i) += (cplx(0.0, basis.wave(m, i)) * v).real();
    }
  }
}

Eigen::MatrixXd tangent_frame(const Eigen::MatrixXd& grad) {
  const int n = static_cast<int>(grad.rows());
  Eigen::MatrixXd F(2 * n, n);
  F.topRows(n) = Eigen::MatrixXd::Identity(n, n);
  F.bottomRows(n) = grad;
  return F;
}

double density(const Eigen::MatrixXd& grad) {
  const Eigen::MatrixXd F = tangent_frame(grad);
  return std::sqrt((F.transpose() * F).determinant());
}

/// Polar-coordinate ball volume with given angular and radial resolutions.
template <int Q>
double polar_volume(const CalibratedSample& s, double r, int M) {
  const int n = s.sigma.dim();
  Eigen::VectorXd p0;
  Eigen::MatrixXd g0;
  section_jet(s.sigma, s.base_x, p0, g0);
  auto along_ray = [&](const Eigen::VectorXd& u) {
    auto dist = [&](double t) {
      Eigen::VectorXd v;
      Eigen::MatrixXd g;
      section_jet(s.sigma, s.base_x + t * u, v, g);
      return std::sqrt(t * t + (v - p0).squaredNorm());
    };
    double tstar = r;
    const double fr = dist(r) - r;
    if (fr > 0.0) {
      boost::uintmax_t iters = 100;
      const auto root = boost::math::tools::toms748_solve([&](double t) { return dist(t) - r; }, 0.0, r, -r, fr,
                                                          boost::math::tools::eps_tolerance<double>(50), iters);
      tstar = 0.5 * (root.first + root.second);
    }
    return boost::math::quadrature::gauss<double, Q>::integrate(
        [&](double t) {
          Eigen::VectorXd v;
          Eigen::MatrixXd g;
          section_jet(s.sigma, s.base_x + t * u, v, g);
          return density(g) * std::pow(t, n - 1);
        },
        0.0, tstar);
  };
  if (n == 1) {
    return along_ray(Eigen::VectorXd::Constant(1, 1.0)) + along_ray(Eigen::VectorXd::Constant(1, -1.0));
  }
  if (n == 2) {
    double acc = 0.0;
    for (int k = 0; k < M; ++k) {
      const double phi = 2.0 * kPi * k / M;
      Eigen::VectorXd u(2);
      u << std::cos(phi), std::sin(phi);
      acc += along_ray(u);
    }
    return acc * 2.0 * kPi / M;
  }
  if (n == 3) {
    double acc = 0.0;
    for (int k = 0; k < M; ++k) {
      const double phi = 2.0 * kPi * k / M;
      acc += boost::math::quadrature::gauss<double, Q>::integrate(
          [&](double c) {
            const double sn = std::sqrt(std::max(0.0, 1.0 - c * c));
            Eigen::VectorXd u(3);
            u << sn * std::cos(phi), sn * std::sin(phi), c;
            return along_ray(u);
          },
          -1.0, 1.0);
    }
    return acc * 2.0 * kPi / M;
  }
  throw InvalidInput("polar ball volumes are implemented for n <= 3");
}

}  // namespace

double sphere_area(int k) {
  if (k < 0) throw InvalidInput("sphere dimension must be >= 0");
  switch (k) {
    case 0: return 2.0;
    case 1: return 2.0 * kPi;
    case 2: return 4.0 * kPi;
    default: return 2.0 * std::pow(kPi, 0.5 * (k + 1)) / boost::math::tgamma(0.5 * (k + 1));
  }
}

double unit_ball_volume(int n) { return sphere_area(n - 1) / n; }

double model_ball_volume(int n, double L, double r) {
  if (n < 1 || !(r >= 0.0) || !(L >= 0.0)) throw InvalidInput("model ball needs n >= 1, r >= 0, Lambda >= 0");
  if (L == 0.0) return unit_ball_volume(n) * std::pow(r, n);
  const double k = std::sqrt(L);
  if (r > kPi / k * (1.0 + 1e-15)) throw InvalidInput("radius beyond the model hemisphere pi / sqrt(Lambda)");
  if (n == 1) return 2.0 * r;
  double err = 0.0;
  const double integral = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      [&](double t) { return std::pow(std::sin(k * t) / k, n - 1); }, 0.0, r, 15, 1e-14, &err);
  return sphere_area(n - 1) * integral;
}

double model_volume_lower_bound(int n, double r) {
  return std::pow(2.0, n - 1) / (n * std::pow(kPi, n - 1)) * std::pow(r, n) * sphere_area(n - 1);
}

double CalibratedSample::calibration_excess() const {
  double e = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < calibration_values.size(); ++i) e = std::max(e, calibration_values[i] - volume_density[i]);
  return e;
}

double CalibratedSample::calibration_gap() const {
  double e = 0.0;
  for (std::size_t i = 0; i < calibration_values.size(); ++i) {
    e = std::max(e, std::abs(calibration_values[i] - volume_density[i]));
  }
  return e;
}

CalibratedSample sample_calibrated(const AmbientForm& calibration, const Eigen::VectorXd& y, const TorusForm& sigma,
                                   const Eigen::VectorXd& base_x, int samples_per_dim) {
  const int n = sigma.dim();
  if (calibration.degree() != n || calibration.dim() != n) throw InvalidInput("calibration must be an n-form");
  if (sigma.degree() != 1 || y.size() != n || base_x.size() != n) throw InvalidInput("graph data has wrong shape");
  CalibratedSample s;
  s.y = y;
  s.sigma = sigma;
  s.calibration = calibration;
  s.base_x = base_x;
  const SpectralGrid grid(n, sigma.cutoff(), std::max(samples_per_dim, 2 * sigma.cutoff() + 2));
  s.samples_per_dim = grid.points();
  const auto vals = to_grid(sigma, grid);
  const auto grads = gradient_to_grid(sigma, grid);
  for (std::size_t g = 0; g < grid.num_points(); ++g) {
    const Eigen::VectorXd x = sigma.lattice().to_cartesian(grid.grid_point_u(g));
    Eigen::VectorXd p(n);
    Eigen::MatrixXd J(n, n);
    for (int j = 0; j < n; ++j) {
      p(j) = y(j) + vals[j][g].real();
      for (int i = 0; i < n; ++i) J(j, i) = grads[j][i][g].real();
    }
    Eigen::VectorXd pt(2 * n);
    pt << x, p;
    s.points.push_back(pt);
    s.calibration_values.push_back(evaluate_on_frame(calibration.evaluate(x, p), n, tangent_frame(J)));
    s.volume_density.push_back(density(J));
  }
  return s;
}

double calibration_on_plane(const AmbientForm& calibration, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                            const Eigen::MatrixXd& frame) {
  const int n = calibration.dim();
  if (frame.rows() != 2 * n || frame.cols() != n) throw InvalidInput("frame must be 2n x n");
  const double vol = std::sqrt((frame.transpose() * frame).determinant());
  if (!(vol > 0.0)) throw InvalidInput("degenerate frame");
  return evaluate_on_frame(calibration.evaluate(x, y), n, frame) / vol;
}

double calibrated_period(const CalibratedSample& s) {
  double acc = 0.0;
  for (double v : s.calibration_values) acc += v;
  return acc / static_cast<double>(s.calibration_values.size()) * s.sigma.lattice().covolume();
}

double fiber_volume(const CalibratedSample& s) {
  double acc = 0.0;
  for (double v : s.volume_density) acc += v;
  return acc / static_cast<double>(s.volume_density.size()) * s.sigma.lattice().covolume();
}

BallVolume calibrated_ball_volume(const CalibratedSample& s, double r, double tol) {
  if (!(r > 0.0)) throw InvalidInput("ball radius must be positive");
  const int n = s.sigma.dim();
  const Lattice& lattice = s.sigma.lattice();
  Eigen::VectorXd p0;
  Eigen::MatrixXd g0;
  section_jet(s.sigma, s.base_x, p0, g0);
  double far = 0.0;
  double slope = 0.0;
  for (std::size_t g = 0; g < s.points.size(); ++g) {
    const Eigen::VectorXd x = s.points[g].head(n);
    const Eigen::VectorXd p = s.points[g].tail(n);
    const double dx = lattice.torus_distance(x, s.base_x);
    far = std::max(far, std::sqrt(dx * dx + (p - s.y - p0).squaredNorm()));
    slope = std::max(slope, s.volume_density[g]);
  }
  double h = 0.0;
  for (int a = 0; a < n; ++a) h = std::max(h, lattice.basis().col(a).norm() / s.samples_per_dim);
  BallVolume out;
  if (r >= far + h * slope) {
    out.volume = fiber_volume(s);
    out.method = "whole-fiber";
    return out;
  }
  if (r > lattice.injectivity_radius()) {
    throw InvalidInput("ball radius lies between the torus injectivity radius and the fiber diameter");
  }
  // p0 above is sigma(base_x); the ray distance uses offsets only.
  const double coarse = polar_volume<20>(s, r, 32);
  const double fine = polar_volume<40>(s, r, 64);
  out.volume = fine;
  out.uncertainty = std::abs(fine - coarse);
  out.method = "polar";
  if (out.uncertainty > tol * std::max(1.0, fine)) {
    throw Undersampled("ball volume quadrature did not settle", out.uncertainty);
  }
  return out;
}

ComparisonReport check_volume_comparison(const CalibratedSample& s, double r, double L, double tolerance) {
  const int n = s.sigma.dim();
  const double inj = s.sigma.lattice().injectivity_radius();
  if (r > inj) {
    throw PreconditionViolation("radius " + std::to_string(r) + " exceeds the injectivity radius " +
                                std::to_string(inj));
  }
  if (L > 0.0 && r > kPi / std::sqrt(L)) {
    throw PreconditionViolation("radius exceeds pi / sqrt(Lambda) = " + std::to_string(kPi / std::sqrt(L)));
  }
  const BallVolume v = calibrated_ball_volume(s, r);
  ComparisonReport rep;
  rep.r = r;
  rep.curvature_bound = L;
  rep.measured_volume = v.volume;
  rep.uncertainty = v.uncertainty;
  rep.model_volume = model_ball_volume(n, L, r);
  rep.euclidean_model_volume = model_ball_volume(n, 0.0, r);
  rep.margin = rep.measured_volume - rep.model_volume;
  rep.holds = rep.margin >= -tolerance && rep.measured_volume - rep.euclidean_model_volume >= -tolerance;
  return rep;
}

double injectivity_radius_flat(const Lattice& lattice, double scale) {
  if (!(scale > 0.0)) throw InvalidInput("scale must be positive");
  return lattice.scaled(scale).injectivity_radius();
}

InjectivityReport injectivity_bound(int k, double i, double integral) {
  if (k < 1) throw InvalidInput("dimension must be >= 1");
  InjectivityReport rep;
  rep.dim = k;
  rep.injectivity_radius = i;
  rep.integral = integral;
  const double area = sphere_area(k - 1);
  rep.lhs = std::pow(i, k);
  rep.rhs = k * std::pow(kPi, k - 1) / (std::pow(2.0, k - 1) * area) * integral;
  rep.hypothesis_bound = kPi / (2.0 * k) * area;
  rep.hypothesis_ok = integral < rep.hypothesis_bound;
  rep.holds = rep.lhs <= rep.rhs * (1.0 + 1e-12);
  rep.ratio = rep.lhs > 0.0 ? rep.rhs / rep.lhs : std::numeric_limits<double>::infinity();
  return rep;
}

InjectivityReport check_injectivity_bound(const Lattice& lattice, const CalibratedSample& fiber) {
  return injectivity_bound(fiber.sigma.dim(), lattice.injectivity_radius(), calibrated_period(fiber));
}

SubtorusReport check_subtorus_bound(const std::vector<double>& theta, int N, const Eigen::MatrixXd& B, double inj) {
  const int k = static_cast<int>(B.cols());
  if (B.rows() != N || theta.size() != masks_of_degree(N, k).size()) {
    throw InvalidInput("sub-torus data has inconsistent dimensions");
  }
  SubtorusReport rep;
  const auto& masks = masks_of_degree(N, k);
  std::vector<double> minor(static_cast<std::size_t>(k * k));
  for (std::size_t m = 0; m < masks.size(); ++m) {
    if (theta[m] == 0.0) continue;
    const auto rows = indices_of(masks[m]);
    for (int r = 0; r < k; ++r) {
      for (int c = 0; c < k; ++c) minor[r * k + c] = B(rows[r], c);
    }
    rep.integral += theta[m] * small_det(minor.data(), k);
  }
  rep.volume = std::sqrt((B.transpose() * B).determinant());
  rep.bound = injectivity_bound(k, inj, rep.integral);
  return rep;
}

double flat_ball_volume_circle(double s) {
  if (!(s > 0.0 && s <= 2.0)) throw InvalidInput("closed form needs 0 < s <= 2");
  const double h = 0.5 * s;
  return 2.0 * (h * std::sqrt(1.0 - h * h) + std::asin(h));
}

double flat_ball_volume(const Lattice& lattice, double scale, double rho, int) {
  const Lattice L = lattice.scaled(scale);
  const int n = L.dim();
  if (n > 3) throw InvalidInput("flat ball volumes are implemented for n <= 3");
  if (!(rho > 0.0)) return 0.0;
  // B(0, rho) in T^n x R^n has volume int_{Voronoi cell} w_n (rho^2 - |x|^2)_+^{n/2} dx.
  // In polar form around 0 this is int_{S^{n-1}} h(min(R(theta), rho)) d theta, with
  // R the Voronoi radial function and h the closed radial integral.
  const double wn = unit_ball_volume(n);
  const double r2 = rho * rho;
  auto h = [&](double m) -> double {
    if (n == 1) return m * std::sqrt(std::max(0.0, r2 - m * m)) + r2 * std::asin(std::min(1.0, m / rho));
    if (n == 2) return kPi * (0.5 * r2 * m * m - 0.25 * m * m * m * m);
    const double q = std::sqrt(std::max(0.0, r2 - m * m));
    const double q3 = q * q * q;
    return wn * (-m * q3 * q * q / 6.0 + r2 * m * q3 / 24.0 + r2 * r2 * m * q / 16.0 +
                 r2 * r2 * r2 / 16.0 * std::asin(std::min(1.0, m / rho)));
  };
  // Candidate Voronoi-relevant vectors; the same coefficient box torus_distance searches.
  std::vector<Eigen::VectorXd> lambdas;
  int box = 1;
  for (int i = 0; i < n; ++i) box *= 7;
  for (int idx = 0; idx < box; ++idx) {
    Eigen::VectorXd k(n);
    for (int i = 0, rest = idx; i < n; ++i, rest /= 7) k(i) = rest % 7 - 3;
    if (k.cwiseAbs().maxCoeff() > 0.0) lambdas.push_back(L.basis() * k);
  }
  // Keep vectors whose midpoint lies in the closed cell; this retains every facet.
  std::vector<Eigen::VectorXd> relevant;
  for (const auto& l : lambdas) {
    bool keep = true;
    for (const auto& m : lambdas) keep = keep && l.dot(m) <= m.squaredNorm() * (1.0 + 1e-12);
    if (keep) relevant.push_back(l);
  }
  lambdas.swap(relevant);
  auto radial = [&](const Eigen::VectorXd& dir) {
    double R = std::numeric_limits<double>::infinity();
    for (const auto& l : lambdas) {
      const double p = dir.dot(l);
      if (p > 0.0) R = std::min(R, 0.5 * l.squaredNorm() / p);
    }
    return std::min(R, rho);
  };
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  if (n == 1) {
    Eigen::VectorXd e(1);
    e(0) = 1.0;
    const double a = h(radial(e));
    e(0) = -1.0;
    return a + h(radial(e));
  }
  double err = 0.0;
  if (n == 2) {
    return GK::integrate(
        [&](double phi) {
          Eigen::VectorXd d(2);
          d << std::cos(phi), std::sin(phi);
          return h(radial(d));
        },
        0.0, 2.0 * kPi, 20, 1e-13, &err);
  }
  return GK::integrate(
      [&](double th) {
        double inner = 0.0;
        const double st = std::sin(th);
        return st * GK::integrate(
                        [&](double phi) {
                          Eigen::VectorXd d(3);
                          d << st * std::cos(phi), st * std::sin(phi), std::cos(th);
                          return h(radial(d));
                        },
                        0.0, 2.0 * kPi, 10, 1e-9, &inner);
      },
      0.0, kPi, 10, 1e-9, &err);
}

MonteCarloVolume monte_carlo_ball_volume(const Lattice& lattice, double scale, double rho, std::uint64_t samples,
                                         std::uint64_t seed, int threads, int batches) {
  const Lattice L = lattice.scaled(scale);
  const int n = L.dim();
  batches = std::max(1, batches);
  std::vector<std::uint64_t> hits(static_cast<std::size_t>(batches), 0);
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(batches), samples / batches);
  counts.back() += samples % batches;
  parallel_for(static_cast<std::size_t>(batches), threads, [&](std::size_t b) {
    Rng rng(seed, 1000 + b);
    Eigen::VectorXd u(n);
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(n);
    std::uint64_t h = 0;
    for (std::uint64_t i = 0; i < counts[b]; ++i) {
      for (int a = 0; a < n; ++a) u(a) = rng.uniform();
      double y2 = 0.0;
      for (int a = 0; a < n; ++a) {
        const double y = rng.uniform(-rho, rho);
        y2 += y * y;
      }
      const double d = L.torus_distance(L.to_cartesian(u), zero);
      if (d * d + y2 < rho * rho) ++h;
    }
    hits[b] = h;
  });
  std::uint64_t total = 0;
  for (auto h : hits) total += h;
  const double box = L.covolume() * std::pow(2.0 * rho, n);
  const double p = static_cast<double>(total) / static_cast<double>(samples);
  MonteCarloVolume out;
  out.samples = samples;
  out.estimate = box * p;
  out.half_width = 2.5758293035489 * box * std::sqrt(p * (1.0 - p) / static_cast<double>(samples));
  return out;
}

CollapsingTable collapsing_series(const Lattice& lattice, const std::vector<double>& scales, std::uint64_t mc_samples,
                                  std::uint64_t seed, int threads) {
  if (scales.size() < 2) throw InvalidInput("collapsing series needs at least two scales");
  for (std::size_t i = 1; i < scales.size(); ++i) {
    if (!(scales[i] < scales[i - 1]) || !(scales[i] > 0.0)) throw InvalidInput("scales must be positive and decreasing");
  }
  const int n = lattice.dim();
  CollapsingTable t;
  t.limit = lattice.covolume() * unit_ball_volume(n);
  t.mc_consistent = true;
  for (std::size_t i = 0; i < scales.size(); ++i) {
    CollapsingRow row;
    row.scale = scales[i];
    row.integral = std::pow(scales[i], n) * lattice.covolume();
    row.volume = flat_ball_volume(lattice, scales[i], 1.0);
    if (mc_samples > 0) {
      const auto mc = monte_carlo_ball_volume(lattice, scales[i], 1.0, mc_samples, seed + i, threads);
      row.mc_volume = mc.estimate;
      row.mc_half_width = mc.half_width;
      if (std::abs(mc.estimate - row.volume) > std::max(mc.half_width, 0.02 * row.volume)) t.mc_consistent = false;
    }
    row.normalized = row.volume / std::pow(scales[i], n);
    t.rows.push_back(row);
  }
  t.monotone = true;
  for (std::size_t i = 1; i < t.rows.size(); ++i) {
    if (!(t.rows[i].volume < t.rows[i - 1].volume)) t.monotone = false;
  }
  const double a = t.rows[t.rows.size() - 1].normalized;
  const double b = t.rows[t.rows.size() - 2].normalized;
  t.cauchy_gap = std::abs(a - b) / std::abs(a);

  const double s0 = scales.front();
  double prev = std::numeric_limits<double>::infinity();
  t.bishop_gromov_monotone = true;
  for (int k = 1; k <= 10; ++k) {
    const double rho = 0.2 * k;
    const double ratio = flat_ball_volume(lattice, s0, rho) / std::pow(rho, 2 * n);
    t.bishop_gromov_radii.push_back(rho);
    t.bishop_gromov_ratios.push_back(ratio);
    if (ratio > prev * (1.0 + 1e-9)) t.bishop_gromov_monotone = false;
    prev = ratio;
  }
  return t;
}

}  // namespace slagfib
