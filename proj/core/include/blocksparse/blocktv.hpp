#pragma once

#include "blocksparse/fbs_rpca.hpp"
#include "blocksparse/grid.hpp"
#include "blocksparse/solver_common.hpp"

#include <Eigen/Dense>

namespace blocksparse {

/// Stacked forward differences of an image: horizontal (x(r,c+1) - x(r,c)) and
/// vertical (x(r+1,c) - x(r,c)), each N entries in row-major pixel order. The
/// last column of `horizontal` and the last row of `vertical` are zero.
struct GradientField {
  GridShape shape;
  Eigen::VectorXd horizontal;
  Eigen::VectorXd vertical;

  GradientField() = default;
  explicit GradientField(GridShape s);

  [[nodiscard]] double dot(const GradientField& other) const;
};

GradientField grad_op(const ImageGrid& x);

/// Exact transpose of grad_op (negative divergence).
ImageGrid grad_op_adjoint(const GradientField& g);

struct BlockTvConfig {
  double lambda = 0.0;
  double epsilon = 0.0;  // <= 0: 1e-4 * max(1, max|y|)
  int clique_side = 2;
  int max_iters = 500;
  double tol_obj = 1e-8;
  double tol_grad = 1e-10;  // stop when ||grad|| <= tol_grad * max(1, ||y||)
  StepPolicy step = StepPolicy::kBacktracking;
  double alpha = 0.0;       // fixed step or first trial; <= 0: 1 / (1 + 8 lambda l^2 / eps)

  [[nodiscard]] BlockTvConfig resolved(const ImageGrid& y) const;
  void validate() const;
};

struct BlockTvResult {
  ImageGrid x;
  SolverReport report;  // residual_trace holds ||grad|| at each accepted iterate
};

/// 1/2 ||x - y||^2 + lambda sum_c sqrt(sum_{p in c} (h_p^2 + v_p^2) + eps^2), where
/// (h, v) = grad_op(x) and c runs over the l x l patches of the gradient grid.
double blocktv_objective(const ImageGrid& x, const ImageGrid& y, const BlockTvConfig& cfg);

/// Gradient of blocktv_objective: (x - y) + lambda grad_op^T(w .* h, w .* v) with
/// w_p = sum_{c ni p} (s_c + eps^2)^(-1/2).
ImageGrid blocktv_gradient(const ImageGrid& x, const ImageGrid& y, const BlockTvConfig& cfg);

/// Accelerated gradient descent on the smoothed block-TV objective, starting at y.
/// Each step is found by Armijo backtracking from twice the last accepted step;
/// momentum is dropped whenever it would raise the objective, so the objective
/// trace is nonincreasing.
BlockTvResult denoise_blocktv(const ImageGrid& y, const BlockTvConfig& cfg);

}  // namespace blocksparse
