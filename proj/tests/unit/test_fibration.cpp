#include <cmath>

#include "doctest.h"
#include "slagfib/certificate.hpp"
#include "slagfib/errors.hpp"
#include "slagfib/fibration.hpp"
#include "slagfib/group_action.hpp"
#include "slagfib/io.hpp"
#include "slagfib/norms.hpp"
#include "support.hpp"

using namespace slagfib;
using namespace slagfib::testing;

namespace {

struct Setup {
  GeneratedStructure gen;
  std::unique_ptr<DeformationProblem> problem;
  std::unique_ptr<SectionSolver> solver;
};

Setup make_setup(double eps, const std::string& group = "none") {
  Setup s;
  StructureRecipe rec;
  rec.lattice = Lattice::cubic(2, kTwoPi);
  rec.epsilon = eps;
  rec.seed = 7;
  rec.group = group;
  s.gen = generate_structure(rec);
  s.problem = std::make_unique<DeformationProblem>(s.gen.structure, 6);
  CertificateOptions o;
  o.probes = 8;
  o.sigma_samples = 1;
  o.seed = 3;
  s.solver = std::make_unique<SectionSolver>(*s.problem, certify_hypotheses(*s.problem, o));
  return s;
}

}  // namespace

TEST_CASE("base grids") {
  const auto g = make_base_grid(2, 5, 1.0);
  CHECK(g.points.size() == 25);
  for (const auto& y : g.points) CHECK(y.norm() <= 1.0 + 1e-15);
  CHECK(g.axis_neighbours().size() == 40);
  CHECK(grid_invariant(g, GroupAction::flip(Lattice::cubic(2, 1.0))));
  CHECK(g.find(g.points[7]).value() == 7);
  CHECK_FALSE(g.find(Eigen::VectorXd::Constant(2, 0.123)).has_value());
}

TEST_CASE("flat fibration is the model projection") {
  auto s = make_setup(0.0);
  const auto grid = make_base_grid(2, 3, 1.0);
  const auto fib = build_fibration(*s.solver, grid, {}, 7);
  for (const auto& sec : fib.sections) CHECK(sec.max_abs() == 0.0);
  for (const auto& d : fib.diagnostics) CHECK(d.iterations == 0);
  const auto emb = check_embedding(fib, 16);
  CHECK(emb.min_jacobian_det == 1.0);
  CHECK(emb.injective);
  CHECK(emb.min_fiber_separation == doctest::Approx(grid.spacing).epsilon(1e-12));
  CHECK(check_equivariance(fib, GroupAction::trivial(s.gen.structure.lattice()), s.gen.structure) == 0.0);
}

TEST_CASE("perturbed fibration") {
  auto s = make_setup(1e-2);
  const auto grid = make_base_grid(2, 5, 1.0);
  const auto fib = build_fibration(*s.solver, grid, {}, 7);
  const double delta = s.solver->certificate().delta;
  double max_sup = 0.0;
  for (std::size_t i = 0; i < fib.sections.size(); ++i) {
    const auto& d = fib.diagnostics[i];
    CHECK(d.residual_direct <= 1e-8);
    CHECK(d.residual_formula <= 1e-8);
    CHECK(d.sigma_norm <= delta);
    max_sup = std::max(max_sup, d.sigma_sup);
    // Re-check from the stored section.
    CHECK(s.problem->residual_direct(grid.points[i], fib.sections[i]).norm() <= 1e-8);
  }
  CHECK(fib.continuity_ratio <= 1.5);

  SUBCASE("embedding") {
    const auto emb = check_embedding(fib, 16);
    CHECK(emb.injective);
    CHECK(emb.min_jacobian_det >= emb.predicted_det_floor);
    CHECK(emb.predicted_det_floor > 0.0);
    CHECK(emb.min_fiber_separation >= grid.spacing - 2.0 * max_sup);
  }
  SUBCASE("export round-trip and determinism") {
    const auto text = dump(fibration_to_json(fib));
    const auto j = nlohmann::json::parse(text);
    CHECK(j.at("format") == "slagfib.fibration/1");
    CHECK(j.contains("lattice"));
    CHECK(j.at("epsilon") == 1e-2);
    CHECK(j.at("seed") == 7);
    CHECK(j.contains("theta"));
    const auto back = fibration_from_json(j);
    REQUIRE(back.sections.size() == fib.sections.size());
    for (std::size_t i = 0; i < fib.sections.size(); ++i) {
      CHECK(back.sections[i] == fib.sections[i]);
      CHECK(back.derivatives[i][1] == fib.derivatives[i][1]);
    }
    CHECK(dump(fibration_to_json(back)) == text);

    FibrationOptions opt;
    opt.threads = 3;
    const auto again = build_fibration(*s.solver, grid, opt, 7);
    for (std::size_t i = 0; i < fib.sections.size(); ++i) {
      CHECK(std::abs(again.diagnostics[i].residual_direct - fib.diagnostics[i].residual_direct) <= 1e-12);
      CHECK(std::abs(again.diagnostics[i].sigma_norm - fib.diagnostics[i].sigma_norm) <= 1e-12);
    }
    const auto csv = fibration_csv(fib);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 26);
  }
  SUBCASE("equivariance requires an invariant structure") {
    CHECK_THROWS_AS(check_equivariance(fib, GroupAction::flip(s.gen.structure.lattice()), s.gen.structure),
                    PreconditionViolation);
  }
  SUBCASE("fiber failures carry the base point") {
    auto tight = s.solver->certificate();
    tight.delta = 1e-9;
    const SectionSolver bad(*s.problem, tight);
    try {
      (void)build_fibration(bad, grid);
      FAIL("expected FiberError");
    } catch (const FiberError& e) {
      CHECK(e.y.size() == 2);
      CHECK_THROWS_AS(std::rethrow_if_nested(e), BudgetViolation);
    }
  }
}

TEST_CASE("equivariant fibration") {
  auto s = make_setup(1e-2, "flip");
  const auto flip = GroupAction::flip(s.gen.structure.lattice());
  const auto grid = make_base_grid(2, 3, 1.0);
  FibrationOptions opt;
  opt.derivatives = false;
  const auto fib = build_fibration(*s.solver, grid, opt, 7);
  CHECK(check_equivariance(fib, flip, s.gen.structure) <= 1e-9);
  // The fiber over the fixed point y = 0 is mapped to itself.
  const std::size_t centre = *grid.find(Eigen::VectorXd::Zero(2));
  CHECK(c1_alpha_norm(act_on_section(flip.element(1), fib.sections[centre]) - fib.sections[centre]) <= 1e-9);
}
