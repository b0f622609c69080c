#include "blocksparse/regularizer.hpp"

#include "blocksparse/block_filter.hpp"
#include "blocksparse/errors.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <string>

namespace blocksparse {

namespace {

void check_shape(const ImageGrid& x, const CliqueSystem& cs, const char* what) {
  if (x.shape() != cs.shape()) {
    throw ShapeError(std::string(what) + ": image " + std::to_string(x.shape().height) + "x" +
                     std::to_string(x.shape().width) + " vs clique grid " +
                     std::to_string(cs.shape().height) + "x" + std::to_string(cs.shape().width));
  }
}

void require_positive_eps(SmoothingParam sp) {
  if (!(sp.epsilon > 0.0)) {
    throw ConfigError("gradient of J_eps needs eps > 0 (the unsmoothed gradient is undefined at 0)");
  }
}

std::span<const double> as_span(const Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

}  // namespace

SmoothingParam::SmoothingParam(double eps) : epsilon(eps) {
  if (!(eps >= 0.0) || !std::isfinite(eps)) throw ConfigError("smoothing eps must be finite and >= 0");
}

SmoothingParam SmoothingParam::relative_to(const Eigen::Ref<const Eigen::MatrixXd>& x) {
  const double scale = x.size() > 0 ? x.cwiseAbs().maxCoeff() : 0.0;
  return SmoothingParam(1e-4 * std::max(1.0, scale));
}

double eval_J(const ImageGrid& x, const CliqueSystem& cs) {
  check_shape(x, cs, "eval_J");
  const auto xs = as_span(x.values());
  double total = 0.0;
  for (std::size_t c = 0; c < cs.clique_count(); ++c) total += std::sqrt(cs.squared_norm(xs, c));
  return total;
}

double eval_J_eps(const ImageGrid& x, const CliqueSystem& cs, SmoothingParam sp) {
  check_shape(x, cs, "eval_J_eps");
  const auto xs = as_span(x.values());
  const double eps2 = sp.epsilon * sp.epsilon;
  double total = 0.0;
  for (std::size_t c = 0; c < cs.clique_count(); ++c) total += std::sqrt(cs.squared_norm(xs, c) + eps2);
  return total;
}

double eval_J_eps_fft(const ImageGrid& x, const CliqueSystem& cs, SmoothingParam sp) {
  check_shape(x, cs, "eval_J_eps_fft");
  const auto filter = BlockFilter::get(cs.shape().height, cs.shape().width, cs.side());
  const Eigen::VectorXd sq = x.values().array().square();
  return filter->smoothed_sum(as_span(sq), sp.epsilon);
}

ImageGrid grad_J_eps_naive(const ImageGrid& x, const CliqueSystem& cs, SmoothingParam sp) {
  check_shape(x, cs, "grad_J_eps_naive");
  require_positive_eps(sp);
  const double eps2 = sp.epsilon * sp.epsilon;
  ImageGrid g(x.shape());
  for (std::size_t c = 0; c < cs.clique_count(); ++c) {
    const Eigen::VectorXd xc = cs.gather(x, c);
    const Eigen::VectorXd gc = xc / std::sqrt(xc.squaredNorm() + eps2);
    cs.scatter_add(g, c, gc);
  }
  return g;
}

ImageGrid grad_J_eps_fft(const ImageGrid& x, const CliqueSystem& cs, SmoothingParam sp) {
  check_shape(x, cs, "grad_J_eps_fft");
  require_positive_eps(sp);
  const auto filter = BlockFilter::get(cs.shape().height, cs.shape().width, cs.side());
  const Eigen::VectorXd sq = x.values().array().square();
  Eigen::VectorXd w(x.values().size());
  filter->smoothed_weights(as_span(sq), sp.epsilon, {w.data(), static_cast<std::size_t>(w.size())});
  return ImageGrid(x.shape(), x.values().cwiseProduct(w));
}

ImageGrid clique_weights_naive(const ImageGrid& squares, const CliqueSystem& cs, double eps) {
  check_shape(squares, cs, "clique_weights_naive");
  const auto s = as_span(squares.values());
  const double eps2 = eps * eps;
  ImageGrid w(squares.shape());
  for (std::size_t c = 0; c < cs.clique_count(); ++c) {
    double sum = 0.0;
    for (const std::size_t p : cs.indices(c)) sum += s[p];
    const double inv = 1.0 / std::sqrt(sum + eps2);
    for (const std::size_t p : cs.indices(c)) w.values()[static_cast<Eigen::Index>(p)] += inv;
  }
  return w;
}

}  // namespace blocksparse
