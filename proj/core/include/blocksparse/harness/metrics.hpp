#pragma once

#include <Eigen/Dense>

namespace blocksparse::harness {

/// ||x - x0|| / ||x0||; ||x|| when x0 == 0.
double relative_error(const Eigen::MatrixXd& x, const Eigen::MatrixXd& x0);

/// 10 log10(peak^2 / MSE).
double psnr_db(const Eigen::MatrixXd& x, const Eigen::MatrixXd& x0, double peak);

/// 10 log10(mean(clean^2) / mean((noisy - clean)^2)).
double measured_snr_db(const Eigen::MatrixXd& noisy, const Eigen::MatrixXd& clean);

struct SupportScores {
  double precision = 0.0;
  double recall = 0.0;
  double f_measure = 0.0;
};

/// Supports are entries with |value| > threshold. Empty-vs-empty scores 1.
SupportScores support_scores(const Eigen::MatrixXd& estimate, const Eigen::MatrixXd& truth, double threshold);

/// Number of singular values above rel_tol * sigma_max.
int numerical_rank(const Eigen::MatrixXd& m, double rel_tol = 1e-8);

}  // namespace blocksparse::harness
