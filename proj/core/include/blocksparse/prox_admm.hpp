#pragma once

#include "blocksparse/clique_system.hpp"
#include "blocksparse/grid.hpp"
#include "blocksparse/solver_common.hpp"

#include <Eigen/Dense>

#include <vector>

namespace blocksparse {

/// Settings for prox_J.
///
/// The data term carries coefficient 1, i.e. the operator solves
///   argmin_x ||x - v||^2 + lambda * J(x),
/// so a single isolated group is shrunk by lambda / 2. Callers used to the
/// 1/2 ||x - v||^2 convention pass lambda_half = 2 * lambda.
struct ProxConfig {
  double lambda = 0.0;
  double rho = 0.0;  // <= 0 selects lambda + 1
  int max_iters = 5000;
  double tol_abs = 1e-8;
  double tol_rel = 1e-6;

  void validate() const;
  [[nodiscard]] double effective_rho() const { return rho > 0.0 ? rho : lambda + 1.0; }
};

struct ProxResult {
  ImageGrid x;
  // residual_trace holds sqrt(primal^2 + (dual/rho)^2); objective_trace the prox objective.
  SolverReport report;
  std::vector<double> primal_residuals;
  std::vector<double> dual_residuals;
};

/// Block soft-thresholding: max(1 - tau/||v||, 0) * v, and 0 for v == 0.
/// Solves argmin_z tau ||z|| + 1/2 ||z - v||^2.
Eigen::VectorXd group_shrink(const Eigen::VectorXd& v, double tau);

/// Proximal operator of lambda * J via consensus ADMM over the l^2 disjoint
/// clique subsets: one copy z^i of x per subset, each updated by closed-form
/// group shrinkage, and scaled duals u^i.
///
///   x   <- (2 v + rho sum_i (z^i + u^i)) / (2 + s rho)
///   z^i <- group_shrink(x - u^i, lambda / rho) on each clique of subset i,
///          x - u^i on pixels the subset does not cover
///   u^i <- u^i + z^i - x
///
/// Primal residual sqrt(sum_i ||z^i - x||^2), dual residual rho ||z_k - z_{k-1}||.
/// Pixels that belong to a clique shrunk to exactly zero in the final
/// iterate are reported as exact zeros. Hitting max_iters is reported through
/// the termination reason, not an exception.
///
/// warm_start seeds x and every z^i (duals start at 0). The tracker, when
/// given, sees the 2 s N entries of z and u.
ProxResult prox_J(const ImageGrid& v, const CliqueSystem& cs, const ProxConfig& cfg,
                  const ImageGrid* warm_start = nullptr, AllocationTracker* tracker = nullptr);

struct FramewiseProxResult {
  FrameStack frames;
  std::vector<SolverReport> reports;
};

/// prox_J applied to each column independently; columns are distributed over
/// up to `jobs` threads. Output does not depend on `jobs`.
FramewiseProxResult prox_J_framewise(const FrameStack& v, const CliqueSystem& cs, const ProxConfig& cfg,
                                     int jobs = 1);

}  // namespace blocksparse
