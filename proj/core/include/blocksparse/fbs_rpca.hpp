#pragma once

#include "blocksparse/grid.hpp"
#include "blocksparse/solver_common.hpp"

#include <Eigen/Dense>

#include <cstddef>

namespace blocksparse {

enum class StepPolicy { kFixed, kBacktracking };

/// Settings for the sparse-plus-low-rank solver. Non-positive lambda, epsilon
/// and alpha mean "use the default"; resolved() fills them in for given data.
struct RpcaConfig {
  double lambda = 0.0;   // default: 1 / (l sqrt(N))
  double mu = 1.0;
  double alpha = 0.0;    // fixed step, or first trial step; default 1 / (mu + lambda / eps)
  double epsilon = 0.0;  // default: 1e-4 * max(1, max|Y|)
  StepPolicy step = StepPolicy::kBacktracking;
  bool spectral = true;  // backtracking starts from a Barzilai-Borwein step instead of 2x the last one
  int max_iters = 500;
  double tol_obj = 1e-8;
  int clique_side = 2;
  int jobs = 1;

  [[nodiscard]] RpcaConfig resolved(const FrameStack& y) const;
  void validate() const;
};

struct RpcaResult {
  FrameStack sparse;    // X, foreground
  FrameStack low_rank;  // Z, background
  SolverReport report;
  int rank = 0;         // numerical rank of Z at 1e-8 * sigma_max
  RpcaConfig config;    // resolved settings actually used
};

/// Nuclear-norm prox: U diag(max(s - delta, 0)) V^T. Optionally reports the
/// rank of the result and its nuclear norm. Throws NumericalError if the SVD fails.
Eigen::MatrixXd svt(const Eigen::MatrixXd& q, double delta, int* rank = nullptr, double* nuclear_norm = nullptr);

/// 1 / (l sqrt(n1)): every entry of X sits in l^2 group terms.
double default_lambda(int side, std::size_t n1);

/// ||Z||_* + lambda J_eps(X) + mu/2 ||Y - Z - X||_F^2, with J_eps summed over frames.
double rpca_objective(const FrameStack& x, const FrameStack& z, const FrameStack& y, const RpcaConfig& cfg);

/// Forward-backward splitting for the smoothed RPCA objective, starting from
/// X = Z = 0:
///
///   X <- X - alpha (lambda grad J_eps(X) - mu (Y - Z - X))
///   Z <- svt(Z + alpha mu (Y - Z - X), alpha)
///
/// grad J_eps is evaluated frame by frame with the FFT block filter. With
/// backtracking, a trial step is accepted when the smooth part satisfies
/// f(x+) <= f(x) + <grad f(x), x+ - x> + ||x+ - x||^2 / (2 alpha), which makes
/// the full objective nonincreasing. Each iteration first tries the adaptive
/// Barzilai-Borwein step of the last move (or twice the previous step when
/// spectral is off or the estimate is unusable). Rejected trials are undone from the gradient and residual
/// buffers, so the solver holds exactly four N x L working buffers (X, Z,
/// gradient, residual). SVD workspace is internal to the linear-algebra
/// backend and not counted.
///
/// Stops on relative objective decrease below tol_obj or at max_iters. Under
/// a fixed step, an objective above 10x its starting value ends the run as
/// "diverged".
RpcaResult solve_rpca(const FrameStack& y, const RpcaConfig& cfg, AllocationTracker* tracker = nullptr);

}  // namespace blocksparse
