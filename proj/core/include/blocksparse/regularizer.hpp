#pragma once

#include "blocksparse/clique_system.hpp"
#include "blocksparse/grid.hpp"

#include <Eigen/Dense>

namespace blocksparse {

/// Hyperbolic smoothing of the clique norm: ||v||_{2,eps} = sqrt(||v||^2 + eps^2).
struct SmoothingParam {
  double epsilon = 0.0;

  SmoothingParam() = default;
  explicit SmoothingParam(double eps);

  /// 1e-4 * max(1, max|x|): keeps the smoothing bias proportional to signal scale.
  static SmoothingParam relative_to(const Eigen::Ref<const Eigen::MatrixXd>& x);
};

/// J(x) = sum over cliques of ||x_c||_2.
double eval_J(const ImageGrid& x, const CliqueSystem& cs);

/// J_eps(x) = sum over cliques of sqrt(||x_c||^2 + eps^2). Equals eval_J at eps = 0.
double eval_J_eps(const ImageGrid& x, const CliqueSystem& cs, SmoothingParam sp);

/// Same value through the FFT block filter; cost independent of l.
double eval_J_eps_fft(const ImageGrid& x, const CliqueSystem& cs, SmoothingParam sp);

// Gradient of J_eps: g_p = x_p * sum_{c ni p} (||x_c||^2 + eps^2)^(-1/2).
// Both throw ConfigError when eps == 0.

/// Reference path: gather, scale by the reciprocal smoothed norm, scatter_add, per clique.
ImageGrid grad_J_eps_naive(const ImageGrid& x, const CliqueSystem& cs, SmoothingParam sp);

/// Fast path: square, block-correlate, add eps^2, ^(-1/2), block-convolve back, times x.
ImageGrid grad_J_eps_fft(const ImageGrid& x, const CliqueSystem& cs, SmoothingParam sp);

/// Per-pixel weights w_p = sum_{c ni p} (s_c + eps^2)^(-1/2) for a map of squared
/// magnitudes (s_c = clique sum of `squares`), computed clique by clique.
ImageGrid clique_weights_naive(const ImageGrid& squares, const CliqueSystem& cs, double eps);

}  // namespace blocksparse
