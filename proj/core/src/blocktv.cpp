#include "blocksparse/blocktv.hpp"

#include "blocksparse/block_filter.hpp"
#include "blocksparse/errors.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <string>

namespace blocksparse {

GradientField::GradientField(GridShape s)
    : shape(s),
      horizontal(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(s.size()))),
      vertical(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(s.size()))) {}

double GradientField::dot(const GradientField& other) const {
  if (other.shape != shape) throw ShapeError("GradientField::dot: shape mismatch");
  return horizontal.dot(other.horizontal) + vertical.dot(other.vertical);
}

GradientField grad_op(const ImageGrid& x) {
  const GridShape s = x.shape();
  GradientField g(s);
  const Eigen::VectorXd& v = x.values();
  for (int r = 0; r < s.height; ++r) {
    for (int c = 0; c < s.width; ++c) {
      const auto p = static_cast<Eigen::Index>(s.index(r, c));
      if (c + 1 < s.width) g.horizontal[p] = v[p + 1] - v[p];
      if (r + 1 < s.height) g.vertical[p] = v[p + s.width] - v[p];
    }
  }
  return g;
}

ImageGrid grad_op_adjoint(const GradientField& g) {
  const GridShape s = g.shape;
  const auto n = static_cast<Eigen::Index>(s.size());
  if (g.horizontal.size() != n || g.vertical.size() != n) {
    throw ShapeError("grad_op_adjoint: field length does not match its shape");
  }
  ImageGrid out(s);
  Eigen::VectorXd& o = out.values();
  for (int r = 0; r < s.height; ++r) {
    for (int c = 0; c < s.width; ++c) {
      const auto p = static_cast<Eigen::Index>(s.index(r, c));
      if (c + 1 < s.width) {
        o[p] -= g.horizontal[p];
        o[p + 1] += g.horizontal[p];
      }
      if (r + 1 < s.height) {
        o[p] -= g.vertical[p];
        o[p + s.width] += g.vertical[p];
      }
    }
  }
  return out;
}

BlockTvConfig BlockTvConfig::resolved(const ImageGrid& y) const {
  BlockTvConfig out = *this;
  if (!(out.epsilon > 0.0)) {
    const double scale = y.size() > 0 ? y.values().cwiseAbs().maxCoeff() : 0.0;
    out.epsilon = 1e-4 * std::max(1.0, scale);
  }
  if (!(out.alpha > 0.0)) {
    const double l2 = static_cast<double>(out.clique_side) * out.clique_side;
    out.alpha = 1.0 / (1.0 + 8.0 * out.lambda * l2 / out.epsilon);
  }
  return out;
}

void BlockTvConfig::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ConfigError("blocktv: lambda must be >= 0");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ConfigError("blocktv: epsilon must be > 0");
  if (clique_side < 1) throw ConfigError("blocktv: clique side must be >= 1");
  if (max_iters < 1) throw ConfigError("blocktv: max_iters must be >= 1");
  if (!(tol_obj >= 0.0) || !(tol_grad >= 0.0)) throw ConfigError("blocktv: tolerances must be >= 0");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ConfigError("blocktv: alpha must be > 0");
}

namespace {

struct Evaluation {
  double value = 0.0;
  Eigen::VectorXd grad;  // empty unless requested
};

Evaluation evaluate(const BlockFilter& filter, const Eigen::VectorXd& x, const ImageGrid& y,
                    const BlockTvConfig& cfg, bool with_grad) {
  const GridShape s = y.shape();
  const GradientField d = grad_op(ImageGrid(s, x));
  const auto n = static_cast<std::size_t>(x.size());
  const Eigen::VectorXd sq = d.horizontal.array().square() + d.vertical.array().square();
  Evaluation out;
  const double fit = 0.5 * (x - y.values()).squaredNorm();
  if (!with_grad) {
    out.value = fit + cfg.lambda * filter.smoothed_sum({sq.data(), n}, cfg.epsilon);
    return out;
  }
  Eigen::VectorXd w(x.size());
  out.value = fit + cfg.lambda * filter.smoothed_weights({sq.data(), n}, cfg.epsilon, {w.data(), n});
  GradientField weighted(s);
  weighted.horizontal = d.horizontal.cwiseProduct(w);
  weighted.vertical = d.vertical.cwiseProduct(w);
  out.grad = (x - y.values()) + cfg.lambda * grad_op_adjoint(weighted).values();
  return out;
}

void check_sizes(const ImageGrid& y, const BlockTvConfig& cfg) {
  const GridShape s = y.shape();
  if (cfg.clique_side > std::min(s.height, s.width)) {
    throw ConfigError("blocktv: clique side " + std::to_string(cfg.clique_side) + " exceeds image " +
                      std::to_string(s.height) + "x" + std::to_string(s.width));
  }
  if (!y.all_finite()) throw ConfigError("blocktv: input has non-finite entries");
}

}  // namespace

double blocktv_objective(const ImageGrid& x, const ImageGrid& y, const BlockTvConfig& cfg_in) {
  if (x.shape() != y.shape()) throw ShapeError("blocktv_objective: x and y shapes differ");
  const BlockTvConfig cfg = cfg_in.resolved(y);
  cfg.validate();
  check_sizes(y, cfg);
  const auto filter = BlockFilter::get(y.shape().height, y.shape().width, cfg.clique_side);
  return evaluate(*filter, x.values(), y, cfg, false).value;
}

ImageGrid blocktv_gradient(const ImageGrid& x, const ImageGrid& y, const BlockTvConfig& cfg_in) {
  if (x.shape() != y.shape()) throw ShapeError("blocktv_gradient: x and y shapes differ");
  const BlockTvConfig cfg = cfg_in.resolved(y);
  cfg.validate();
  check_sizes(y, cfg);
  const auto filter = BlockFilter::get(y.shape().height, y.shape().width, cfg.clique_side);
  return {y.shape(), evaluate(*filter, x.values(), y, cfg, true).grad};
}

BlockTvResult denoise_blocktv(const ImageGrid& y, const BlockTvConfig& cfg_in) {
  const BlockTvConfig cfg = cfg_in.resolved(y);
  cfg.validate();
  check_sizes(y, cfg);

  Stopwatch clock;
  BlockTvResult result{y, {}};
  SolverReport& report = result.report;
  report.termination = TerminationReason::kMaxIterations;
  if (cfg.lambda == 0.0) {
    report.termination = TerminationReason::kConverged;
    return result;
  }

  const auto filter = BlockFilter::get(y.shape().height, y.shape().width, cfg.clique_side);
  const bool backtracking = cfg.step == StepPolicy::kBacktracking;
  const double grad_tol = cfg.tol_grad * std::max(1.0, y.values().norm());
  const auto objective = [&](const Eigen::VectorXd& p) { return evaluate(*filter, p, y, cfg, false).value; };

  Eigen::VectorXd& x = result.x.values();
  Eigen::VectorXd x_prev = x;
  Evaluation at_x = evaluate(*filter, x, y, cfg, true);
  double alpha = cfg.alpha;
  double t = 1.0;

  if (at_x.grad.norm() <= grad_tol) {
    report.termination = TerminationReason::kConverged;
    report.wall_clock_seconds = clock.seconds();
    return result;
  }

  for (int iter = 1; iter <= cfg.max_iters; ++iter) {
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const double beta = (t - 1.0) / t_next;
    Eigen::VectorXd x_next;
    double f_next = 0.0;
    bool restarted = false;

    if (beta > 0.0) {
      const Eigen::VectorXd probe = x + beta * (x - x_prev);
      const Evaluation at_probe = evaluate(*filter, probe, y, cfg, true);
      double step = alpha;
      if (backtracking) step = backtrack_step(objective, probe, at_probe.grad, 2.0 * alpha, at_probe.value);
      x_next = probe - step * at_probe.grad;
      f_next = objective(x_next);
      if (f_next <= at_x.value) {
        alpha = step;
        t = t_next;
      } else {
        x_next.resize(0);
        restarted = true;
      }
    }
    if (x_next.size() == 0) {
      double step = alpha;
      if (backtracking) step = backtrack_step(objective, x, at_x.grad, 2.0 * alpha, at_x.value);
      x_next = x - step * at_x.grad;
      f_next = objective(x_next);
      alpha = step;
      t = restarted ? 1.0 : t_next;
      if (!backtracking && !(f_next <= at_x.value)) {
        if (!std::isfinite(f_next) || f_next > 10.0 * std::max(at_x.value, 1e-300)) {
          report.termination = TerminationReason::kDiverged;
          report.note = "objective increased under the fixed step; reduce alpha";
          break;
        }
      }
    }

    const double f_prev = at_x.value;
    x_prev = x;
    x = x_next;
    at_x = evaluate(*filter, x, y, cfg, true);
    const double g_norm = at_x.grad.norm();
    report.iterations = iter;
    report.objective_trace.push_back(at_x.value);
    report.residual_trace.push_back(g_norm);

    if (g_norm <= grad_tol ||
        std::abs(f_prev - at_x.value) <= cfg.tol_obj * std::max(std::abs(f_prev), 1e-300)) {
      report.termination = TerminationReason::kConverged;
      break;
    }
  }

  report.wall_clock_seconds = clock.seconds();
  return result;
}

}  // namespace blocksparse
