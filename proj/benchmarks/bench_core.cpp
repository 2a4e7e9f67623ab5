#include <benchmark/benchmark.h>

#include <numbers>

#include "slagfib/certificate.hpp"
#include "slagfib/comparison.hpp"
#include "slagfib/deformation.hpp"
#include "slagfib/dirac.hpp"
#include "slagfib/norms.hpp"
#include "slagfib/section_solver.hpp"

using namespace slagfib;

namespace {

const GeneratedStructure& structure() {
  static const GeneratedStructure g = [] {
    StructureRecipe r;
    r.lattice = Lattice::cubic(2, 2.0 * std::numbers::pi);
    r.epsilon = 1e-2;
    r.seed = 7;
    return generate_structure(r);
  }();
  return g;
}

void BM_GridRoundTrip(benchmark::State& state) {
  DeformationProblem P(structure().structure, static_cast<int>(state.range(0)));
  Rng rng(1);
  const auto s = random_section(P.basis(), rng, 0.1);
  for (auto _ : state) {
    auto values = to_grid(s, P.grid());
    benchmark::DoNotOptimize(from_grid(P.basis(), 1, values, P.grid()));
  }
}
BENCHMARK(BM_GridRoundTrip)->Arg(8)->Arg(16)->Unit(benchmark::kMicrosecond);

void BM_ResidualDirect(benchmark::State& state) {
  DeformationProblem P(structure().structure, static_cast<int>(state.range(0)));
  Rng rng(2);
  const auto s = random_section(P.basis(), rng, 0.1);
  const Eigen::VectorXd y = Eigen::VectorXd::Constant(2, 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(P.residual_direct(y, s));
}
BENCHMARK(BM_ResidualDirect)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_LinearizeSigma(benchmark::State& state) {
  DeformationProblem P(structure().structure, 8);
  Rng rng(3);
  const auto s = random_section(P.basis(), rng, 0.1);
  const auto d = random_section(P.basis(), rng, 1.0);
  const Eigen::VectorXd y = Eigen::VectorXd::Constant(2, 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(P.linearize_sigma(y, s, d));
}
BENCHMARK(BM_LinearizeSigma)->Unit(benchmark::kMillisecond);

void BM_SurrogateNorm(benchmark::State& state) {
  DeformationProblem P(structure().structure, 8);
  Rng rng(4);
  const auto s = random_section(P.basis(), rng, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(c1_alpha_norm(s));
}
BENCHMARK(BM_SurrogateNorm)->Unit(benchmark::kMillisecond);

void BM_DiracInvert(benchmark::State& state) {
  DeformationProblem P(structure().structure, 8);
  Rng rng(5);
  const auto w = P.dirac().apply(random_section(P.basis(), rng, 1.0));
  for (auto _ : state) benchmark::DoNotOptimize(P.dirac().invert(w));
}
BENCHMARK(BM_DiracInvert)->Unit(benchmark::kMicrosecond);

void BM_Solve(benchmark::State& state) {
  DeformationProblem P(structure().structure, 8);
  CertificateOptions o;
  o.probes = 8;
  o.sigma_samples = 1;
  const SectionSolver S(P, certify_hypotheses(P, o));
  SolveOptions so;
  so.mode = state.range(0) == 0 ? SolveMode::FixedSlope : SolveMode::Newton;
  const Eigen::VectorXd y = Eigen::VectorXd::Constant(2, 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(S.solve(y, so));
}
BENCHMARK(BM_Solve)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_FlatBallVolume(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(flat_ball_volume(Lattice::cubic(n, 1.0), 0.5, 1.0));
}
BENCHMARK(BM_FlatBallVolume)->Arg(1)->Arg(2)->Unit(benchmark::kMicrosecond);

}  // namespace
BENCHMARK_MAIN();
