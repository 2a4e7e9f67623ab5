#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "slagfib/certificate.hpp"
#include "slagfib/flat_model.hpp"
#include "slagfib/section_solver.hpp"

namespace slagfib::cli {

/// Schema violation; the message starts with the dotted field path.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CollapsingSpec {
  Lattice lattice;
  std::vector<double> scales;
  std::uint64_t mc_samples = 1000000;
};

struct VerifySpec {
  int base_points = 5;
  std::vector<double> radii;  // empty: derived from the injectivity radius
  int samples_per_dim = 32;
  std::optional<CollapsingSpec> collapsing;
};

/// Parsed run configuration. Every field has a documented range; unknown
/// keys are rejected at every level.
struct RunConfig {
  std::string name = "run";
  StructureRecipe recipe;
  int cutoff = 8;
  int grid_points = 9;
  double grid_radius = 1.0;
  double solve_tol = 1e-10;
  double fiber_tol = 1e-8;
  double comparison_tol = 1e-6;
  CertificateOptions certificate;
  SolveMode mode = SolveMode::FixedSlope;
  int max_iterations = 200;
  std::vector<Eigen::VectorXd> solve_points;
  bool derivatives = true;
  int embedding_samples = 32;
  VerifySpec verify;
  nlohmann::json echo;  // the validated input, with the effective seed
};

RunConfig parse_config(const nlohmann::json& j);

}  // namespace slagfib::cli
