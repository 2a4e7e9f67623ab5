#pragma once

#include <cstdint>
#include <string>
#include <utility>

#include "slagfib/ambient_form.hpp"
#include "slagfib/group_action.hpp"
#include "slagfib/lattice.hpp"
#include "slagfib/rng.hpp"

namespace slagfib {

/// Flat structure on T^n x B(0, 2r): g = sum dx^2 + dy^2,
/// omega = sum dx_j ^ dy_j, Omega = wedge_j (dx_j + i dy_j).
class FlatCalabiYau {
 public:
  FlatCalabiYau() = default;
  FlatCalabiYau(Lattice lattice, double r);

  int dim() const { return lattice_.dim(); }
  const Lattice& lattice() const { return lattice_; }
  double r() const { return r_; }
  double domain_radius() const { return 2.0 * r_; }
  const AmbientForm& omega() const { return omega_; }
  const AmbientForm& Omega() const { return Omega_; }

 private:
  Lattice lattice_;
  double r_ = 0.0;
  AmbientForm omega_;
  AmbientForm Omega_;
};

FlatCalabiYau build_flat_structure(int n, const Lattice& lattice, double r);

/// omega_k = omega_0 - d alpha, Omega_k = a e^{-i theta} (Omega_0 + d beta), where
/// alpha and beta already include the perturbation size epsilon.
struct PerturbedCalabiYau {
  FlatCalabiYau base;
  AmbientForm alpha;  // real, degree 1
  AmbientForm beta;   // complex, degree n - 1
  double epsilon = 0.0;
  AmbientForm omega_k;
  AmbientForm Omega_k;
  double a = 1.0;
  double theta = 0.0;

  int dim() const { return base.dim(); }
  const Lattice& lattice() const { return base.lattice(); }
  double r() const { return base.r(); }
  bool is_flat() const { return alpha.empty() && beta.empty(); }
};

/// Seeded band-limited sampler for the potentials.
struct PotentialSpec {
  int band = 2;         // |k_i| <= band
  double decay = 4.0;   // amplitude ~ (1 + |k|)^{-decay}
  int poly_cap = 3;     // total y-degree <= poly_cap
};

struct Potentials {
  AmbientForm alpha;  // real 1-form, sqrt(sum |c|^2 R^{2 deg}) = 1 on the domain
  AmbientForm beta;   // complex (n-1)-form, same normalisation
};

Potentials sample_potentials(const FlatCalabiYau& base, const PotentialSpec& spec, Rng& rng);
/// Averages both potentials over the group; the result is invariant.
Potentials average_potentials(const Potentials& p, const GroupAction& action);

/// Optional global rescaling c e^{-i phi} of Omega before normalisation.
struct PhaseSpec {
  double scale = 1.0;
  double angle = 0.0;
};

/// Builds (omega_k, Omega_k, a, theta) from potentials scaled by epsilon.
/// Throws DegenerateStructure when omega_k^n or Omega_k ^ conj(Omega_k)
/// drops below half its flat value somewhere on the sampled domain.
PerturbedCalabiYau perturb_structure(const FlatCalabiYau& base, const AmbientForm& alpha,
                                     const AmbientForm& beta, double epsilon, PhaseSpec phase = {});
PerturbedCalabiYau flat_perturbed(const FlatCalabiYau& base);

/// (a, theta) with integral over T^n x {0} of Omega = a e^{-i theta} covolume,
/// theta in (-pi, pi]. Throws VanishingPeriod when the period is zero.
std::pair<double, double> phase_normalize(const AmbientForm& Omega_pert);

/// Period of an n-form over the zero section T^n x {0}.
cplx zero_section_period(const AmbientForm& form);

/// Re(e^{i theta} Omega_k).
AmbientForm calibration_form(const PerturbedCalabiYau& s, double theta);
/// omega^n / n! of a structure's Kaehler form.
AmbientForm kahler_calibration(const AmbientForm& omega);

/// Smallest ratio over sampled points of |top coefficient| against the flat
/// value for omega^n and Omega ^ conj(Omega).
double nondegeneracy_ratio(const PerturbedCalabiYau& s, int torus_points = 8);

/// Group by name: "none" or "flip".
GroupAction make_group(const std::string& name, const Lattice& lattice);

/// Everything needed to regenerate a structure bit-for-bit.
struct StructureRecipe {
  Lattice lattice;
  double r = 1.0;
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  PotentialSpec potential;
  std::string group = "none";
  PhaseSpec phase;
};

struct GeneratedStructure {
  StructureRecipe recipe;
  Potentials potentials;  // before scaling by epsilon
  PerturbedCalabiYau structure;
};

/// Samples potentials from Rng(seed), averages them over the group and
/// builds the perturbed structure.
GeneratedStructure generate_structure(const StructureRecipe& recipe);

}  // namespace slagfib
