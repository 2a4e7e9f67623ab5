#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "slagfib/group_action.hpp"
#include "slagfib/section_solver.hpp"

namespace slagfib {

/// Tensor grid of base points on [-h, h]^n with h = radius / sqrt(n), so every
/// point lies in the closed ball of the given radius.
struct BaseGrid {
  int dim = 0;
  int points_per_dim = 0;
  double radius = 0.0;
  double spacing = 0.0;
  std::vector<Eigen::VectorXd> points;

  /// Index of the grid point equal to y (within 1e-12), if any.
  std::optional<std::size_t> find(const Eigen::VectorXd& y) const;
  /// Neighbour pairs along grid axes.
  std::vector<std::pair<std::size_t, std::size_t>> axis_neighbours() const;
};

BaseGrid make_base_grid(int n, int points_per_dim, double radius);
/// Every point of the grid maps to a grid point under every base map B.
bool grid_invariant(const BaseGrid& grid, const GroupAction& action);

struct FiberDiagnostics {
  double residual_direct = 0.0;
  double residual_formula = 0.0;
  double sigma_norm = 0.0;
  double sigma_sup = 0.0;
  int iterations = 0;
  double derivative_norm = 0.0;  // max over base directions of ||D sigma e_j||_{C1a}
};

struct Fibration {
  BaseGrid grid;
  std::vector<TorusForm> sections;
  /// derivatives[i][j] = D sigma(y_i) e_j; empty when not computed.
  std::vector<std::vector<TorusForm>> derivatives;
  std::vector<FiberDiagnostics> diagnostics;
  double theta = 0.0;
  double a = 1.0;
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  double delta = 0.0;
  /// max over axis neighbours of ||sigma_i - sigma_j|| / (spacing * max ||D sigma e||).
  double continuity_ratio = 0.0;
};

struct FibrationOptions {
  int threads = 0;
  SolveOptions solve;
  bool derivatives = true;
  double fiber_tol = 1e-8;  // both residual definitions, surrogate norm
};

/// Solves every fiber concurrently; the first failing base point (in grid
/// order) aborts with a FiberError carrying y and nesting the cause.
Fibration build_fibration(const SectionSolver& solver, const BaseGrid& grid, const FibrationOptions& options = {},
                          std::uint64_t seed = 0);

struct EmbeddingReport {
  double min_jacobian_det = 0.0;
  double max_section_slope = 0.0;  // max |d sigma_j / d y_i|
  double predicted_det_floor = 0.0;  // 1 - 2 n max_section_slope
  double min_fiber_separation = 0.0;
  bool injective = false;
};

/// Jacobian det(I + d sigma / dy) on samples^n torus points per fiber, and the
/// smallest ambient distance between sampled points of distinct fibers.
EmbeddingReport check_embedding(const Fibration& fibration, int samples = 32);

/// max over group elements and grid points of ||g.sigma(y) - sigma(B y)||_{C1a}.
/// Throws PreconditionViolation when the structure or the grid is not invariant.
double check_equivariance(const Fibration& fibration, const GroupAction& action, const PerturbedCalabiYau& structure,
                          double alpha = 0.5);

nlohmann::json fibration_to_json(const Fibration& f);
Fibration fibration_from_json(const nlohmann::json& j);
/// Rows y_1..y_n, sigma_norm, residual_direct, residual_formula, iterations.
std::string fibration_csv(const Fibration& f);

}  // namespace slagfib
