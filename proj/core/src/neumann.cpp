#include "slagfib/neumann.hpp"

#include <cmath>

#include "slagfib/errors.hpp"
#include "slagfib/norms.hpp"

namespace slagfib {

double measure_contraction(const DiracOperator& D, const SectionOperator& V, Rng& rng, int probes, double alpha) {
  double worst = 0.0;
  for (int p = 0; p < probes; ++p) {
    const TorusForm s = random_section(D.basis(), rng, 1.0, 2.0 + (p % 3), alpha);
    // Harmonic leakage from aliasing is far below the defect tolerance; drop it.
    Residual v = V(s);
    v.second.remove_harmonic();
    if (v.first) v.first->remove_harmonic();
    worst = std::max(worst, c1_alpha_norm(D.invert(v, 1e-6), alpha));
  }
  return worst;
}

double sampled_inverse_norm(const DiracOperator& D, const SectionOperator& V, Rng& rng, int probes, double alpha) {
  double worst = 0.0;
  for (int p = 0; p < probes; ++p) {
    const TorusForm s = random_section(D.basis(), rng, 1.0, 2.0 + (p % 3), alpha);
    const double image = (D.apply(s) + V(s)).norm(alpha);
    if (image > 0.0) worst = std::max(worst, 1.0 / image);
  }
  return worst;
}

NeumannResult perturbed_invert(const DiracOperator& D, const SectionOperator& V, const Residual& target,
                               double contraction, double rel_tol, int max_terms, double defect_tol) {
  if (!(contraction < 0.5)) {
    throw SmallnessViolation("Neumann series refused: contraction " + std::to_string(contraction) +
                                 " is not below 1/2",
                             contraction);
  }
  NeumannResult out;
  TorusForm term = D.invert(target, defect_tol);
  out.solution = term;
  const double first = term.max_abs();
  out.term_sizes.push_back(first);
  out.terms = 1;
  if (first == 0.0 || !V) return out;
  while (out.term_sizes.back() > rel_tol * first) {
    if (out.terms >= max_terms) {
      throw Divergence("Neumann series did not reach its truncation tolerance", out.term_sizes);
    }
    Residual v = V(term);
    const double leak = D.projection_defect(v);
    if (leak > defect_tol) throw ProjectionDefect("perturbation leaves the residual space", leak);
    v.second.remove_harmonic();
    if (v.first) v.first->remove_harmonic();
    term = D.invert(v);
    term *= -1.0;
    out.solution += term;
    out.term_sizes.push_back(term.max_abs());
    ++out.terms;
  }
  return out;
}

}  // namespace slagfib
