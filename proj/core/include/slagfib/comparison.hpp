#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "slagfib/ambient_form.hpp"
#include "slagfib/lattice.hpp"
#include "slagfib/torus_form.hpp"

namespace slagfib {

/// Volume of the unit k-sphere, 2 pi^{(k+1)/2} / Gamma((k+1)/2).
double sphere_area(int k);
/// Volume of the unit n-ball.
double unit_ball_volume(int n);

/// Volume of the radius-r ball in the n-dimensional model of constant
/// curvature Lambda: sphere_area(n-1) * int_0^r (sin(sqrt(L) t)/sqrt(L))^{n-1} dt.
/// Lambda = 0 gives the Euclidean ball. Requires r <= pi / sqrt(Lambda).
double model_ball_volume(int n, double curvature_bound, double r);
/// (2^{n-1} / (n pi^{n-1})) r^n sphere_area(n-1), a lower bound for r <= pi/2, Lambda = 1.
double model_volume_lower_bound(int n, double r);

/// Graph piece L = {(x, y + sigma(x))} of T^n x R^n with a calibration Theta,
/// sampled on a torus grid. Volumes use the flat ambient metric.
struct CalibratedSample {
  Eigen::VectorXd y;
  TorusForm sigma;
  AmbientForm calibration;
  Eigen::VectorXd base_x;  // p = (base_x, y + sigma(base_x))
  int samples_per_dim = 0;
  std::vector<Eigen::VectorXd> points;    // ambient (x, y + sigma(x))
  std::vector<double> calibration_values; // Theta on the oriented tangent plane
  std::vector<double> volume_density;     // sqrt det(I + J^T J)

  /// Largest calibration_values - volume_density (should be <= 0).
  double calibration_excess() const;
  /// Largest |calibration_values - volume_density|.
  double calibration_gap() const;
};

CalibratedSample sample_calibrated(const AmbientForm& calibration, const Eigen::VectorXd& y, const TorusForm& sigma,
                                   const Eigen::VectorXd& base_x, int samples_per_dim = 32);

/// Theta evaluated on the oriented n-plane spanned by the columns of `frame`
/// (2n x n, Cartesian), divided by the plane's volume.
double calibration_on_plane(const AmbientForm& calibration, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                            const Eigen::MatrixXd& frame);

/// Integral of Theta over L (spectral quadrature of the pulled-back form).
double calibrated_period(const CalibratedSample& sample);
/// Riemannian volume of L.
double fiber_volume(const CalibratedSample& sample);

struct BallVolume {
  double volume = 0.0;
  double uncertainty = 0.0;
  std::string method;  // "whole-fiber" or "polar"
};

/// Volume of B(p, r) intersected with L. Radii below the torus injectivity
/// radius use polar coordinates around p with root-finding for the boundary;
/// radii beyond the sampled fiber diameter return the whole fiber volume.
/// Throws Undersampled when two resolutions disagree by more than `tol`.
BallVolume calibrated_ball_volume(const CalibratedSample& sample, double r, double tol = 1e-9);

struct ComparisonReport {
  double r = 0.0;
  double curvature_bound = 0.0;
  double measured_volume = 0.0;
  double model_volume = 0.0;
  double euclidean_model_volume = 0.0;
  double margin = 0.0;
  double uncertainty = 0.0;
  bool holds = false;
};

/// Vol(B(p, r) cap L) >= model volume; also compares against the Euclidean
/// ball when Lambda > 0. Throws PreconditionViolation unless
/// r <= min(injectivity radius, pi / sqrt(Lambda)).
ComparisonReport check_volume_comparison(const CalibratedSample& sample, double r, double curvature_bound,
                                         double tolerance = 1e-6);

/// Injectivity radius of the flat model T^n(s Lambda) x R^n.
double injectivity_radius_flat(const Lattice& lattice, double scale);

struct InjectivityReport {
  int dim = 0;
  double injectivity_radius = 0.0;
  double integral = 0.0;       // int_L Theta
  double lhs = 0.0;            // i^k
  double rhs = 0.0;            // k pi^{k-1} / (2^{k-1} area(k-1)) int Theta
  double hypothesis_bound = 0.0;  // pi / (2k) area(k-1)
  bool hypothesis_ok = false;
  bool holds = false;
  double ratio = 0.0;  // rhs / lhs
};

/// i^k <= k pi^{k-1} / (2^{k-1} area(k-1)) * integral, valid when
/// integral < pi/(2k) area(k-1).
InjectivityReport injectivity_bound(int k, double injectivity_radius, double integral);
/// The bound for a calibrated graph in a flat model T^n x R^n.
InjectivityReport check_injectivity_bound(const Lattice& lattice, const CalibratedSample& fiber);

/// Constant-coefficient calibration on a flat sub-torus spanned by the
/// columns of `generators` (N x k) in R^N with ambient injectivity radius i.
struct SubtorusReport {
  double integral = 0.0;  // Theta(b_1, ..., b_k)
  double volume = 0.0;    // sqrt det(B^T B)
  InjectivityReport bound;
};
SubtorusReport check_subtorus_bound(const std::vector<double>& theta_coeffs, int ambient_dim,
                                    const Eigen::MatrixXd& generators, double injectivity_radius);

/// Vol B(p, rho) in T^n(s Lambda) x R^n at p = (0, 0):
/// int_T unit_ball_volume(n) (rho^2 - d_T(x, 0)^2)_+^{n/2} dx.
double flat_ball_volume(const Lattice& lattice, double scale, double rho, int nodes_per_dim = 0);
/// Closed form of flat_ball_volume for n = 1, Lambda = Z, rho = 1, s <= 2.
double flat_ball_volume_circle(double s);

struct MonteCarloVolume {
  double estimate = 0.0;
  double half_width = 0.0;  // 99% confidence
  std::uint64_t samples = 0;
};
/// Hit-or-miss estimate of Vol B(p, rho) with per-batch streams of one seed.
MonteCarloVolume monte_carlo_ball_volume(const Lattice& lattice, double scale, double rho, std::uint64_t samples,
                                         std::uint64_t seed, int threads = 0, int batches = 16);

struct CollapsingRow {
  double scale = 0.0;
  double integral = 0.0;  // s^n covol
  double volume = 0.0;    // exact quadrature
  double mc_volume = 0.0;
  double mc_half_width = 0.0;
  double normalized = 0.0;  // volume / s^n
};

struct CollapsingTable {
  std::vector<CollapsingRow> rows;
  bool monotone = false;
  double cauchy_gap = 0.0;        // relative change of volume/s^n over the last two rows
  double limit = 0.0;             // covol * unit_ball_volume(n)
  bool mc_consistent = false;     // |mc - exact| <= max(half_width, 2% exact) on every row
  std::vector<double> bishop_gromov_radii;
  std::vector<double> bishop_gromov_ratios;  // Vol B(rho) / rho^{2n}
  bool bishop_gromov_monotone = false;
};

CollapsingTable collapsing_series(const Lattice& lattice, const std::vector<double>& scales, std::uint64_t mc_samples,
                                  std::uint64_t seed, int threads = 0);

}  // namespace slagfib
