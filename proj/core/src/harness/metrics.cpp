#include "blocksparse/harness/metrics.hpp"

#include "blocksparse/errors.hpp"

#include <cmath>
#include <limits>

namespace blocksparse::harness {

namespace {

void same_shape(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw ShapeError(std::string(what) + ": shape mismatch");
}

}  // namespace

double relative_error(const Eigen::MatrixXd& x, const Eigen::MatrixXd& x0) {
  same_shape(x, x0, "relative_error");
  const double ref = x0.norm();
  const double diff = (x - x0).norm();
  return ref > 0.0 ? diff / ref : diff;
}

double psnr_db(const Eigen::MatrixXd& x, const Eigen::MatrixXd& x0, double peak) {
  same_shape(x, x0, "psnr_db");
  if (!(peak > 0.0)) throw ConfigError("psnr_db: peak must be > 0");
  const double mse = (x - x0).squaredNorm() / static_cast<double>(x0.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / mse);
}

double measured_snr_db(const Eigen::MatrixXd& noisy, const Eigen::MatrixXd& clean) {
  same_shape(noisy, clean, "measured_snr_db");
  const double noise = (noisy - clean).squaredNorm();
  if (noise == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(clean.squaredNorm() / noise);
}

SupportScores support_scores(const Eigen::MatrixXd& estimate, const Eigen::MatrixXd& truth, double threshold) {
  same_shape(estimate, truth, "support_scores");
  const auto est = (estimate.array().abs() > threshold);
  const auto ref = (truth.array().abs() > threshold);
  const double tp = static_cast<double>((est && ref).count());
  const double n_est = static_cast<double>(est.count());
  const double n_ref = static_cast<double>(ref.count());
  SupportScores s;
  s.precision = n_est > 0.0 ? tp / n_est : (n_ref == 0.0 ? 1.0 : 0.0);
  s.recall = n_ref > 0.0 ? tp / n_ref : 1.0;
  const double denom = s.precision + s.recall;
  s.f_measure = denom > 0.0 ? 2.0 * s.precision * s.recall / denom : 0.0;
  return s;
}

int numerical_rank(const Eigen::MatrixXd& m, double rel_tol) {
  if (m.size() == 0) return 0;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
  const Eigen::VectorXd& s = svd.singularValues();
  if (s.size() == 0 || s[0] == 0.0) return 0;
  return static_cast<int>((s.array() > rel_tol * s[0]).count());
}

}  // namespace blocksparse::harness
