#pragma once

#include "blocksparse/clique_system.hpp"
#include "blocksparse/grid.hpp"
#include "blocksparse/prox_admm.hpp"
#include "blocksparse/solver_common.hpp"

#include <Eigen/Dense>

#include <functional>
#include <span>
#include <vector>

namespace blocksparse {

/// Dense M x N measurement operator with forward and adjoint application.
class MeasurementModel {
 public:
  explicit MeasurementModel(Eigen::MatrixXd phi);

  [[nodiscard]] Eigen::Index rows() const { return phi_.rows(); }
  [[nodiscard]] Eigen::Index cols() const { return phi_.cols(); }
  [[nodiscard]] const Eigen::MatrixXd& matrix() const { return phi_; }

  [[nodiscard]] Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  [[nodiscard]] Eigen::VectorXd adjoint(const Eigen::VectorXd& y) const;
  /// Phi(:, support) as a dense M x |support| matrix.
  [[nodiscard]] Eigen::MatrixXd columns(std::span<const Eigen::Index> support) const;

 private:
  Eigen::MatrixXd phi_;
};

struct CgResult {
  Eigen::VectorXd x;
  int iterations = 0;
  double relative_residual = 0.0;  // ||Phi_s^T (Phi_s x - y)|| / ||Phi_s^T y||
  bool degenerate = false;         // curvature breakdown or tolerance not reached
};

/// Conjugate gradients on Phi_s^T Phi_s x = Phi_s^T y without forming the
/// Gram matrix, starting from x0 (zero when empty). Returns the iterate with
/// the smallest normal-equation residual seen; `degenerate` flags rank
/// deficiency. When the system is underdetermined the result is the solution
/// closest to x0.
CgResult cg_solve_normal(const Eigen::MatrixXd& phi_s, const Eigen::VectorXd& y, double tol, int max_it,
                         const Eigen::VectorXd& x0 = {});

/// Keeps the k largest-magnitude entries, zeroing the rest; ties go to the
/// lower index.
Eigen::VectorXd truncate_top_k(const Eigen::VectorXd& x, int k);

struct ColampConfig {
  int k = 1;                   // target sparsity K
  double lambda0 = 16.0;
  double lambda_growth = 1.02; // lambda_n = lambda0 * growth^n, n = 0, 1, ...
  int max_iters = 50;
  double residual_tol = -1.0;  // stop when ||r|| <= this; negative: 1e-10 * ||y||
  double cg_tol = 1e-10;
  // 0: support is the nonzeros of the prox output (entries below
  // 1e-10 * max|x_r| count as zero). > 0: keep that many largest entries instead.
  int support_top = 0;
  ProxConfig prox;             // lambda is overwritten each iteration

  void validate() const;
};

/// Snapshot handed to the observer after every pursuit iteration.
struct PursuitState {
  int n = 0;                              // 0-based iteration
  double lambda = 0.0;                    // prox weight actually used
  const Eigen::VectorXd* x = nullptr;     // x^(n)
  const Eigen::VectorXd* r = nullptr;     // r^(n) = y - Phi x^(n)
  const Eigen::VectorXd* x_reg = nullptr; // prox output x_r^(n)
  std::span<const Eigen::Index> support;  // s = supp(x_r^(n))
  bool cg_degenerate = false;
};

struct ColampResult {
  ImageGrid x;
  SolverReport report;  // residual_trace = ||r^(n)||, objective_trace = ||Phi x - y||^2 + lambda_n J(x)
  std::vector<double> lambdas;
};

using PursuitObserver = std::function<void(const PursuitState&)>;

/// Convex lattice matching pursuit. Per iteration:
///   1. v   = Phi^T r + x
///   2. x_r = prox_J(v, lambda_n) warm-started from x, s = supp(x_r)
///   3. least squares on Phi(:, s) by CG, keep the K largest, embed into x
///   4. r   = y - Phi x
/// until ||r|| <= residual_tol or max_iters. An empty support halves lambda_n
/// once; if the support is still empty the run ends with "support-collapse".
ColampResult colamp_solve(const Eigen::VectorXd& y, const MeasurementModel& phi, const CliqueSystem& cs,
                          const ColampConfig& cfg, const PursuitObserver& observer = {});

}  // namespace blocksparse
