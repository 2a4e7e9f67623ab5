#include <cmath>

#include "doctest.h"
#include "slagfib/certificate.hpp"
#include "slagfib/errors.hpp"
#include "slagfib/io.hpp"
#include "slagfib/neumann.hpp"
#include "slagfib/norms.hpp"
#include "slagfib/pullback.hpp"
#include "slagfib/section_solver.hpp"
#include "support.hpp"

using namespace slagfib;
using namespace slagfib::testing;

namespace {

GeneratedStructure structure(double eps, std::uint64_t seed = 7, const std::string& group = "none") {
  StructureRecipe rec;
  rec.lattice = Lattice::cubic(2, kTwoPi);
  rec.epsilon = eps;
  rec.seed = seed;
  rec.group = group;
  return generate_structure(rec);
}

CertificateOptions quick_options() {
  CertificateOptions o;
  o.probes = 8;
  o.sigma_samples = 1;
  o.seed = 3;
  return o;
}

double diff_norm(const Residual& a, const Residual& b) { return (a - b).norm(); }

TorusForm scaled_random_section(const DeformationProblem& P, Rng& rng, double size) {
  return random_section(P.basis(), rng, size);
}

}  // namespace

TEST_CASE("residuals on the flat structure") {
  const auto g = structure(0.0);
  DeformationProblem P(g.structure, 6);
  Rng rng(31);
  const Eigen::VectorXd y = random_point(2, rng, 1.0);
  CHECK(P.residual_direct(y, P.zero_section()).max_abs() == 0.0);

  SUBCASE("graphs of exact forms are Lagrangian") {
    auto f = random_real_form(P.basis(), 0, rng, 3.0);
    f *= cplx(0.05 / f.max_abs());
    const auto df = exterior_derivative(f);
    const auto r = P.residual_direct(y, df);
    CHECK(r.first->max_abs() < 1e-15);
    CHECK(r.second.max_abs() > 1e-4);
  }
  SUBCASE("formula reduces to the Dirac operator") {
    const auto s = scaled_random_section(P, rng, 0.1);
    const auto r = P.residual_formula(y, s);
    CHECK((*r.first - exterior_derivative(s)).max_abs() == 0.0);
    CHECK((r.second - star_d_star(s)).max_abs() == 0.0);
    CHECK(diff_norm(P.residual_direct(y, s), r) < 1e-12);
  }
  SUBCASE("linearizations are D and 0") {
    const auto s = scaled_random_section(P, rng, 0.1);
    const auto d = scaled_random_section(P, rng, 1.0);
    CHECK(diff_norm(P.linearize_sigma(y, s, d), P.dirac().apply(d)) < 1e-12);
    const Eigen::VectorXd yd = random_point(2, rng, 1.0);
    CHECK(P.linearize_y(y, s, yd).max_abs() == 0.0);
  }
}

TEST_CASE("perturbed residuals") {
  const auto g = structure(1e-2);
  DeformationProblem P(g.structure, 6);
  Rng rng(32);

  SUBCASE("direct and formula residuals agree") {
    for (int t = 0; t < 10; ++t) {
      const Eigen::VectorXd y = random_point(2, rng, 1.0);
      const auto s = scaled_random_section(P, rng, 0.1);
      CHECK(diff_norm(P.residual_direct(y, s), P.residual_formula(y, s)) <= 1e-8);
    }
  }
  SUBCASE("residual at sigma = 0 is the pulled-back potential") {
    const Eigen::VectorXd y = random_point(2, rng, 1.0);
    const auto r = P.residual_formula(y, P.zero_section());
    const auto& s = g.structure;
    const auto first = pullback_graph(exterior_derivative(s.alpha), y, P.zero_section(), P.grid());
    const auto second = hodge_star(
        pullback_graph(exterior_derivative(s.beta).imag_part(), y, P.zero_section(), P.grid()));
    CHECK((*r.first - first).max_abs() < 1e-14);
    CHECK((r.second - second).max_abs() < 1e-14);
  }
  SUBCASE("residual at sigma = 0 is linear in epsilon") {
    const Eigen::VectorXd y = random_point(2, rng, 1.0);
    std::vector<double> ratios;
    for (double eps : {1e-2, 1e-3, 1e-4}) {
      const auto ge = structure(eps);
      DeformationProblem Pe(ge.structure, 6);
      ratios.push_back(Pe.residual_direct(y, Pe.zero_section()).norm() / eps);
    }
    CHECK(ratios[1] == doctest::Approx(ratios[0]).epsilon(0.01));
    CHECK(ratios[2] == doctest::Approx(ratios[0]).epsilon(0.01));
  }
  SUBCASE("central differences converge at second order") {
    const auto g5 = structure(0.05);
    DeformationProblem P5(g5.structure, 6);
    const Eigen::VectorXd y = random_point(2, rng, 0.8);
    const auto s0 = scaled_random_section(P5, rng, 0.1);
    const auto d = scaled_random_section(P5, rng, 5.0);
    double err[2];
    for (int i = 0; i < 2; ++i) {
      const double h = 1e-4 / (1 << i);
      auto fd = P5.residual_direct(y, s0 + cplx(h) * TorusForm(d)) - P5.residual_direct(y, s0 - cplx(h) * TorusForm(d));
      fd *= 1.0 / (2.0 * h);
      const auto an = P5.linearize_sigma(y, s0, d);
      err[i] = diff_norm(fd, an);
      CHECK(err[i] / an.norm() <= 1e-6);
    }
    CHECK(err[0] / err[1] == doctest::Approx(4.0).epsilon(0.125));
  }
  SUBCASE("deviation from D is linear in epsilon") {
    const Eigen::VectorXd y = random_point(2, rng, 1.0);
    const auto s = scaled_random_section(P, rng, 0.1);
    const auto d = scaled_random_section(P, rng, 1.0);
    std::vector<double> v;
    for (double eps : {1e-2, 5e-3, 2.5e-3}) {
      const auto ge = structure(eps);
      DeformationProblem Pe(ge.structure, 6);
      v.push_back(Pe.perturbation(y, s, d).norm());
    }
    CHECK(v[0] / v[1] == doctest::Approx(2.0).epsilon(0.01));
    CHECK(v[1] / v[2] == doctest::Approx(2.0).epsilon(0.01));
  }
}

TEST_CASE("Dirac inversion") {
  auto b = std::make_shared<FourierBasis>(Lattice::cubic(2, kTwoPi), 6);
  const DiracOperator D(b);
  Rng rng(33);
  CHECK(D.smallest_singular_value() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(D.elliptic_constant() * D.smallest_singular_value() >= 1.0 - 1e-9);

  CHECK(D.invert(zero_residual(b)).max_abs() == 0.0);
  for (int t = 0; t < 10; ++t) {
    const auto w = D.apply(random_section(b, rng, 1.0));
    CHECK((D.apply(D.invert(w)) - w).norm() <= 1e-10);
  }
  SUBCASE("eigenvalue-one mode") {
    auto w = zero_residual(b);
    const int kp[2] = {1, 0};
    const int km[2] = {-1, 0};
    w.second.set(kp, 0, cplx(0.0, -0.5));
    w.second.set(km, 0, cplx(0.0, 0.5));
    const auto xi = D.invert(w);
    // div(-cos x1 dx1) = sin x1.
    for (int i = 0; i < 5; ++i) {
      const Eigen::VectorXd x = random_point(2, rng, 5.0);
      const auto v = xi.evaluate(x);
      CHECK(std::abs(v[0] + std::cos(x(0))) < 1e-15);
      CHECK(std::abs(v[1]) < 1e-15);
    }
  }
  SUBCASE("harmonic targets are rejected") {
    auto w = zero_residual(b);
    w.second.at(0, b->zero_mode()) = 1e-6;
    CHECK(D.projection_defect(w) == doctest::Approx(1e-6));
    CHECK_THROWS_AS(D.invert(w), ProjectionDefect);
  }
  SUBCASE("elliptic estimate on probes") {
    DiracOperator Dc(b);
    Dc.calibrate_elliptic_constant(rng, 16);
    for (int t = 0; t < 10; ++t) {
      const auto w = Dc.apply(random_section(b, rng, 1.0));
      CHECK(c1_alpha_norm(Dc.invert(w)) <= Dc.elliptic_constant() * w.norm() * (1.0 + 1e-9) + 1e-12);
    }
  }
}

TEST_CASE("Neumann series") {
  auto b = std::make_shared<FourierBasis>(Lattice::cubic(2, kTwoPi), 6);
  const DiracOperator D(b);
  Rng rng(34);
  const auto target = D.apply(random_section(b, rng, 1.0));

  SUBCASE("V = 0 is plain inversion") {
    const SectionOperator V = [&](const TorusForm&) { return zero_residual(b); };
    const auto res = perturbed_invert(D, V, target, 0.0);
    CHECK(res.solution == D.invert(target));
  }
  SUBCASE("V = lambda D has the closed form D^{-1} / (1 + lambda)") {
    const double lambda = 0.3;
    const SectionOperator V = [&](const TorusForm& s) { return lambda * D.apply(s); };
    CHECK(measure_contraction(D, V, rng, 8) == doctest::Approx(lambda).epsilon(1e-9));
    const auto res = perturbed_invert(D, V, target, lambda);
    auto expect = D.invert(target);
    expect *= cplx(1.0 / (1.0 + lambda));
    CHECK((res.solution - expect).max_abs() < 1e-14);
    for (std::size_t j = 1; j < res.term_sizes.size(); ++j) {
      CHECK(res.term_sizes[j] <= lambda * res.term_sizes[j - 1] * (1.0 + 1e-9));
    }
    const SectionOperator V2 = [&](const TorusForm& s) { return 0.6 * D.apply(s); };
    CHECK_THROWS_AS(perturbed_invert(D, V2, target, 0.6), SmallnessViolation);
  }
  SUBCASE("deformation perturbations") {
    const auto g = structure(2e-2);
    DeformationProblem P(g.structure, 6);
    for (int t = 0; t < 3; ++t) {
      const Eigen::VectorXd y = random_point(2, rng, 1.2);
      const auto s = random_section(P.basis(), rng, 0.1);
      const SectionOperator V = [&](const TorusForm& v) { return P.perturbation(y, s, v); };
      const double q = measure_contraction(P.dirac(), V, rng, 8);
      REQUIRE(q < 0.5);
      const auto w = P.dirac().apply(random_section(P.basis(), rng, 1.0));
      const auto res = perturbed_invert(P.dirac(), V, w, q);
      CHECK((P.linearize_sigma(y, s, res.solution) - w).norm() <= 1e-8);
      for (std::size_t j = 1; j + 1 < res.term_sizes.size(); ++j) {
        CHECK(res.term_sizes[j] <= 1.5 * q * res.term_sizes[j - 1]);
      }
    }
  }
}

TEST_CASE("certificates") {
  SUBCASE("flat structure") {
    const auto g = structure(0.0);
    DeformationProblem P(g.structure, 6);
    const auto c = certify_hypotheses(P, quick_options());
    CHECK(c.deviation_bound == 0.0);
    CHECK(c.residual_at_zero == 0.0);
    CHECK(c.hypotheses_ok);
  }
  SUBCASE("hypotheses flag follows its definition") {
    CHECK(IFTCertificate::evaluate(1.0, 0.5, 0.05, 0.2, 0.25));
    CHECK_FALSE(IFTCertificate::evaluate(1.0, 0.51, 0.05, 0.2, 0.25));
    CHECK_FALSE(IFTCertificate::evaluate(1.0, 0.1, 0.051, 0.2, 0.25));
    CHECK_FALSE(IFTCertificate::evaluate(1.0, 0.1, 0.01, 0.25, 0.25));
  }
  SUBCASE("large epsilon fails and the boundary is bracketed") {
    const auto bad = structure(0.5);
    DeformationProblem Pb(bad.structure, 6);
    const auto cb = certify_hypotheses(Pb, quick_options());
    CHECK_FALSE(cb.hypotheses_ok);
    // Bisection on log epsilon between a certified and a failing value.
    double lo = 1e-2, hi = 0.5;
    for (int it = 0; it < 4; ++it) {
      const double mid = std::sqrt(lo * hi);
      const auto gm = structure(mid);
      DeformationProblem Pm(gm.structure, 6);
      (certify_hypotheses(Pm, quick_options()).hypotheses_ok ? lo : hi) = mid;
    }
    CHECK(lo < hi);
    const auto gl = structure(lo);
    DeformationProblem Pl(gl.structure, 6);
    CHECK(certify_hypotheses(Pl, quick_options()).hypotheses_ok);
  }
  SUBCASE("record round-trip") {
    const auto g = structure(1e-2);
    DeformationProblem P(g.structure, 6);
    const auto c = certify_hypotheses(P, quick_options());
    const auto back = certificate_from_json(nlohmann::json::parse(dump(certificate_to_json(c))));
    CHECK(back.Cbar == c.Cbar);
    CHECK(back.deviation_bound == c.deviation_bound);
    CHECK(back.hypotheses_ok == c.hypotheses_ok);
    CHECK(back.probes == c.probes);
    CHECK(back.seed == c.seed);
  }
}

TEST_CASE("section solver") {
  SUBCASE("flat structure solves in zero iterations") {
    const auto g = structure(0.0);
    DeformationProblem P(g.structure, 6);
    const SectionSolver S(P, certify_hypotheses(P, quick_options()));
    Rng rng(35);
    const auto r = S.solve(random_point(2, rng, 0.7));
    CHECK(r.iterations == 0);
    CHECK(r.section.sigma.max_abs() == 0.0);
    for (const auto& col : S.solution_derivative(r.section.y, r.section.sigma)) CHECK(col.max_abs() == 0.0);
  }

  const auto g = structure(1e-2);
  DeformationProblem P(g.structure, 6);
  const auto cert = certify_hypotheses(P, quick_options());
  REQUIRE(cert.hypotheses_ok);
  const SectionSolver S(P, cert);
  const Eigen::VectorXd y0 = Eigen::VectorXd::Zero(2);

  SUBCASE("fixed slope and Newton agree; multi-start is unique") {
    const auto a = S.solve(y0);
    CHECK(P.residual_direct(y0, a.section.sigma).norm() <= 1e-8);
    CHECK(a.section.sigma.harmonic_norm() == 0.0);
    SolveOptions o;
    o.mode = SolveMode::Newton;
    const auto b = S.solve(y0, o);
    CHECK(c1_alpha_norm(a.section.sigma - b.section.sigma) <= 1e-9);
    CHECK(b.iterations <= a.iterations);
    Rng rng(36);
    for (int t = 0; t < 3; ++t) {
      SolveOptions os;
      os.initial = random_section(P.basis(), rng, cert.delta * rng.uniform());
      CHECK(c1_alpha_norm(S.solve(y0, os).section.sigma - a.section.sigma) <= 1e-9);
    }
  }
  SUBCASE("solution derivative matches re-solves") {
    const Eigen::VectorXd y = (Eigen::VectorXd(2) << 0.3, -0.4).finished();
    const auto base = S.solve(y);
    const auto cols = S.solution_derivative(y, base.section.sigma);
    const double h = 1e-3;
    for (int j = 0; j < 2; ++j) {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(2);
      e(j) = h;
      auto fd = S.solve(y + e).section.sigma - S.solve(y - e).section.sigma;
      fd *= cplx(1.0 / (2.0 * h));
      CHECK(c1_alpha_norm(fd - cols[j]) <= 1e-5);
    }
  }
  SUBCASE("derivative norm is linear in epsilon") {
    const auto g2 = structure(5e-3);
    DeformationProblem P2(g2.structure, 6);
    const SectionSolver S2(P2, certify_hypotheses(P2, quick_options()));
    const Eigen::VectorXd y = (Eigen::VectorXd(2) << 0.2, 0.1).finished();
    const double n1 = c1_alpha_norm(S.solution_derivative(y, S.solve(y).section.sigma)[0]);
    const double n2 = c1_alpha_norm(S2.solution_derivative(y, S2.solve(y).section.sigma)[0]);
    CHECK(n1 / n2 == doctest::Approx(2.0).epsilon(0.02));
  }
  SUBCASE("failures are typed") {
    SolveOptions o;
    o.max_iterations = 1;
    o.tol = 1e-300;
    try {
      (void)S.solve(y0, o);
      FAIL("expected Divergence");
    } catch (const Divergence& e) {
      CHECK(e.residual_history.size() == 2);
    }
    auto tight = cert;
    tight.delta = 1e-9;
    CHECK_THROWS_AS(SectionSolver(P, tight).solve(y0), BudgetViolation);
    auto failed = cert;
    failed.hypotheses_ok = false;
    CHECK_THROWS_AS(SectionSolver(P, failed).solve(y0), PreconditionViolation);
    CHECK_THROWS_AS(S.solve(Eigen::VectorXd::Constant(2, 2.0)), PreconditionViolation);
  }
}
