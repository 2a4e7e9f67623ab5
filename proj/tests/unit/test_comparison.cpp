#include <cmath>
#include <numbers>

#include "doctest.h"
#include "slagfib/certificate.hpp"
#include "slagfib/comparison.hpp"
#include "slagfib/errors.hpp"
#include "slagfib/section_solver.hpp"
#include "support.hpp"

using namespace slagfib;
using namespace slagfib::testing;

namespace {

constexpr double kPi = std::numbers::pi;

CalibratedSample flat_fiber(int n, double s, int samples = 32) {
  const Lattice lat = Lattice::cubic(n, s);
  const auto flat = build_flat_structure(n, lat, 1.0);
  const TorusForm zero(lat, 4, 1);
  return sample_calibrated(calibration_form(flat_perturbed(flat), 0.0), Eigen::VectorXd::Zero(n), zero,
                           Eigen::VectorXd::Zero(n), samples);
}

}  // namespace

TEST_CASE("model volumes") {
  CHECK(sphere_area(0) == 2.0);
  CHECK(sphere_area(1) == doctest::Approx(2.0 * kPi).epsilon(1e-15));
  CHECK(sphere_area(2) == doctest::Approx(4.0 * kPi).epsilon(1e-15));
  CHECK(unit_ball_volume(3) == doctest::Approx(4.0 * kPi / 3.0).epsilon(1e-15));
  for (double r : {0.1, 0.7, 1.5, kPi / 2}) {
    CHECK(std::abs(model_ball_volume(1, 1.0, r) - 2.0 * r) <= 1e-10);
    CHECK(std::abs(model_ball_volume(2, 1.0, r) - 2.0 * kPi * (1.0 - std::cos(r))) <= 1e-10);
    // S^3 of curvature 1: pi (2r - sin 2r).
    CHECK(std::abs(model_ball_volume(3, 1.0, r) - kPi * (2.0 * r - std::sin(2.0 * r))) <= 1e-10);
    for (int n = 1; n <= 4; ++n) {
      CHECK(model_volume_lower_bound(n, r) <= model_ball_volume(n, 1.0, r) * (1.0 + 1e-12));
      CHECK(std::abs(model_ball_volume(n, 0.0, r) - unit_ball_volume(n) * std::pow(r, n)) <= 1e-10);
    }
  }
  CHECK(std::abs(model_ball_volume(2, 1.0, kPi / 2) - 2.0 * kPi) <= 1e-10);
  // Curvature 4 rescales radii by 2 and volumes by 2^{-n}.
  CHECK(std::abs(model_ball_volume(2, 4.0, 0.5) - 0.25 * model_ball_volume(2, 1.0, 1.0)) <= 1e-12);
  CHECK_THROWS_AS(model_ball_volume(2, 1.0, kPi + 0.1), InvalidInput);
}

TEST_CASE("flat calibrated fibers") {
  SUBCASE("calibration is the volume form") {
    const auto smp = flat_fiber(2, 1.3);
    CHECK(smp.calibration_gap() <= 1e-15);
    CHECK(std::abs(calibrated_period(smp) - 1.69) <= 1e-12);
    CHECK(std::abs(fiber_volume(smp) - 1.69) <= 1e-12);
  }
  SUBCASE("non-calibrated planes are strictly smaller") {
    const auto smp = flat_fiber(2, 1.0);
    Rng rng(41);
    for (int t = 0; t < 20; ++t) {
      Eigen::MatrixXd frame(4, 2);
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 2; ++j) frame(i, j) = rng.normal();
      const double v = calibration_on_plane(smp.calibration, Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(2), frame);
      CHECK(v < 1.0 - 1e-6);
      CHECK(v >= -1.0 - 1e-12);
    }
  }
  SUBCASE("whole fiber inside large balls") {
    for (double s : {0.5, 1.0, 2.0}) {
      const auto smp = flat_fiber(2, s);
      const auto bv = calibrated_ball_volume(smp, 3.0 * s);
      CHECK(bv.method == "whole-fiber");
      CHECK(std::abs(bv.volume - s * s) <= 1e-12);
    }
  }
  SUBCASE("small balls are arcs and disks") {
    const auto c = flat_fiber(1, 2.0);
    for (double r : {0.1, 0.5, 0.9}) {
      CHECK(std::abs(calibrated_ball_volume(c, r).volume - 2.0 * r) <= 1e-9);
      const auto rep = check_volume_comparison(c, r, 0.0);
      CHECK(rep.holds);
      CHECK(std::abs(rep.margin) <= 1e-9);
    }
    const auto d = flat_fiber(2, 2.0);
    for (double r : {0.2, 0.6, 0.95}) {
      const auto rep = check_volume_comparison(d, r, 0.0);
      CHECK(rep.holds);
      CHECK(std::abs(rep.measured_volume - kPi * r * r) <= 1e-8);
    }
    CHECK_THROWS_AS(check_volume_comparison(d, 1.2, 0.0), PreconditionViolation);
    CHECK_THROWS_AS(check_volume_comparison(d, 0.5, 100.0), PreconditionViolation);
  }
}

TEST_CASE("solved fibers") {
  StructureRecipe rec;
  rec.lattice = Lattice::cubic(2, kTwoPi);
  rec.epsilon = 1e-2;
  rec.seed = 7;
  const auto g = generate_structure(rec);
  DeformationProblem P(g.structure, 6);
  CertificateOptions o;
  o.probes = 8;
  o.sigma_samples = 1;
  const SectionSolver S(P, certify_hypotheses(P, o));
  const Eigen::VectorXd y = (Eigen::VectorXd(2) << 0.2, -0.3).finished();
  const auto sol = S.solve(y);
  const auto smp = sample_calibrated(calibration_form(g.structure, g.structure.theta), y, sol.section.sigma,
                                     Eigen::VectorXd::Zero(2), 32);
  // Volumes use the flat metric, so the calibration inequality holds up to O(epsilon).
  CHECK(smp.calibration_excess() <= rec.epsilon);
  {
    StructureRecipe half = rec;
    half.epsilon = rec.epsilon / 2;
    const auto gh = generate_structure(half);
    DeformationProblem Ph(gh.structure, 6);
    const SectionSolver Sh(Ph, certify_hypotheses(Ph, o));
    const auto sh = Sh.solve(y);
    const auto smh = sample_calibrated(calibration_form(gh.structure, gh.structure.theta), y, sh.section.sigma,
                                       Eigen::VectorXd::Zero(2), 32);
    CHECK(smp.calibration_gap() / smh.calibration_gap() == doctest::Approx(2.0).epsilon(0.05));
  }
  const double period = calibrated_period(smp);
  const auto whole = calibrated_ball_volume(smp, 20.0);
  CHECK(std::abs(whole.volume - period) <= 0.01 * period);
  for (double r : {0.5, 1.5, 2.5}) {
    const auto rep = check_volume_comparison(smp, r, 0.0);
    CHECK(rep.holds);
    CHECK(rep.margin >= -1e-6);
  }
}

TEST_CASE("injectivity radius and bound") {
  CHECK(injectivity_radius_flat(Lattice::cubic(3, 1.0), 2.5) == doctest::Approx(1.25).epsilon(1e-15));
  CHECK(injectivity_radius_flat(Lattice::hexagonal(1.0), 1.0) == doctest::Approx(0.5).epsilon(1e-15));
  Eigen::MatrixXd B(2, 2);
  B << 1.0, 0.4, 0.2, 0.7;
  const Lattice skew(B);
  CHECK(injectivity_radius_flat(skew, 3.0) == doctest::Approx(3.0 * injectivity_radius_flat(skew, 1.0)).epsilon(1e-14));

  SUBCASE("tight at n = 1") {
    for (double s : {0.5, 1.0, 2.0, 3.0}) {
      const auto rep = check_injectivity_bound(Lattice::cubic(1, s), flat_fiber(1, s));
      CHECK(rep.hypothesis_ok);
      CHECK(rep.holds);
      CHECK(std::abs(rep.lhs - s / 2) <= 1e-12);
      CHECK(std::abs(rep.rhs - s / 2) <= 1e-12);
    }
    CHECK_FALSE(check_injectivity_bound(Lattice::cubic(1, 3.5), flat_fiber(1, 3.5)).hypothesis_ok);
  }
  SUBCASE("factor two at n = 2") {
    for (double s : {0.25, 0.5, 1.0}) {
      const auto rep = check_injectivity_bound(Lattice::cubic(2, s), flat_fiber(2, s));
      CHECK(rep.hypothesis_ok);
      CHECK(rep.holds);
      CHECK(std::abs(rep.ratio - 2.0) <= 1e-9);
    }
  }
  SUBCASE("Kaehler sub-torus in flat C^2") {
    // omega = dx1 dy1 + dx2 dy2 on R^4 with coordinates (x1, x2, y1, y2);
    // coefficients listed over masks_of_degree(4, 2).
    std::vector<double> omega(6, 0.0);
    omega[1] = 1.0;  // {0, 2}
    omega[4] = 1.0;  // {1, 3}
    const double s = 0.8;
    Eigen::MatrixXd gen = Eigen::MatrixXd::Zero(4, 2);
    gen(0, 0) = s;  // x1 direction
    gen(2, 1) = s;  // y1 direction: a complex line
    const auto rep = check_subtorus_bound(omega, 4, gen, s / 2);
    CHECK(std::abs(rep.integral - rep.volume) <= 1e-15);
    CHECK(rep.bound.hypothesis_ok);
    CHECK(rep.bound.holds);
  }
}

TEST_CASE("collapsing flat family") {
  CHECK(std::abs(flat_ball_volume(Lattice::cubic(1, 1.0), 0.5, 1.0) - flat_ball_volume_circle(0.5)) <= 1e-10);
  // Unit square inside the unit disk: pi * int_square (1 - |x|^2) = 5 pi / 6.
  CHECK(std::abs(flat_ball_volume(Lattice::cubic(2, 1.0), 1.0, 1.0) - 5.0 * kPi / 6.0) <= 1e-10);
  // Below the injectivity radius the ball does not see the lattice.
  CHECK(std::abs(flat_ball_volume(Lattice::hexagonal(1.0), 1.0, 0.3) - unit_ball_volume(4) * std::pow(0.3, 4)) <=
        1e-13);
  {
    const auto mc = monte_carlo_ball_volume(Lattice::cubic(3, 1.0), 0.5, 1.0, 400000, 5, 4);
    CHECK(std::abs(mc.estimate - flat_ball_volume(Lattice::cubic(3, 1.0), 0.5, 1.0)) <= mc.half_width);
  }
  const auto t = collapsing_series(Lattice::cubic(1, 1.0), {1.0, 0.5, 0.25, 0.125}, 200000, 9, 4);
  REQUIRE(t.rows.size() == 4);
  CHECK(t.monotone);
  CHECK(t.cauchy_gap <= 0.02);
  CHECK(t.mc_consistent);
  CHECK(t.bishop_gromov_monotone);
  for (const auto& r : t.rows) {
    CHECK(r.integral == r.scale);
    CHECK(std::abs(r.volume - flat_ball_volume_circle(r.scale)) <= 1e-9);
  }
  // Vol(s) / Vol(s/2) approaches 2^n.
  CHECK(std::abs(t.rows[2].volume / t.rows[3].volume - 2.0) < std::abs(t.rows[0].volume / t.rows[1].volume - 2.0));
  CHECK(t.rows[3].normalized == doctest::Approx(t.limit).epsilon(0.02));
}
