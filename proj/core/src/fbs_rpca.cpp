#include "blocksparse/fbs_rpca.hpp"

#include "blocksparse/block_filter.hpp"
#include "blocksparse/errors.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace blocksparse {

namespace {

// Sum over frames of J_eps(X_t).
double frames_smoothed_sum(const BlockFilter& filter, const Eigen::MatrixXd& x, double eps, int jobs) {
  const int frames = static_cast<int>(x.cols());
  const auto n = static_cast<std::size_t>(x.rows());
  std::vector<double> per_frame(static_cast<std::size_t>(frames), 0.0);
  parallel_for(frames, jobs, [&](int t) {
    Eigen::VectorXd sq = x.col(t).array().square();
    per_frame[static_cast<std::size_t>(t)] = filter.smoothed_sum({sq.data(), n}, eps);
  });
  double total = 0.0;
  for (const double v : per_frame) total += v;
  return total;
}

struct Spectral {
  double ss = 0.0;
  double sy = 0.0;
  double yy = 0.0;
};

// Recomputes R = Y - Z - X and G = lambda grad J_eps(X) - mu R in place, frame by
// frame, and returns J_eps(X). With `spectral`, also accumulates the inner
// products of the last step s = (X - X_prev, Z - Z_prev) and the gradient change
// (G - G_prev, -mu (R - R_prev)); the previous iterate is recovered from the
// old buffers as X_prev = X + step G_prev, Z_prev = Y - X_prev - R_prev.
double refresh(const BlockFilter& filter, const Eigen::MatrixXd& y, const Eigen::MatrixXd& x,
               const Eigen::MatrixXd& z, Eigen::MatrixXd& r, Eigen::MatrixXd& g, double eps, double lambda,
               double mu, int jobs, double step, Spectral* spectral) {
  const int frames = static_cast<int>(x.cols());
  const auto n = static_cast<std::size_t>(x.rows());
  std::vector<double> per_frame(static_cast<std::size_t>(frames), 0.0);
  std::vector<Spectral> parts(static_cast<std::size_t>(frames));
  parallel_for(frames, jobs, [&](int t) {
    Eigen::VectorXd r_old;
    Eigen::VectorXd g_old;
    if (spectral != nullptr) {
      r_old = r.col(t);
      g_old = g.col(t);
    }
    r.col(t) = y.col(t) - z.col(t) - x.col(t);
    Eigen::VectorXd sq = x.col(t).array().square();
    Eigen::VectorXd w(static_cast<Eigen::Index>(n));
    per_frame[static_cast<std::size_t>(t)] = filter.smoothed_weights({sq.data(), n}, eps, {w.data(), n});
    g.col(t) = lambda * x.col(t).cwiseProduct(w) - mu * r.col(t);
    if (spectral == nullptr) return;
    const Eigen::VectorXd sx = -step * g_old;
    const Eigen::VectorXd sz = z.col(t) - y.col(t) + x.col(t) + step * g_old + r_old;
    const Eigen::VectorXd dx = g.col(t) - g_old;
    const Eigen::VectorXd dz = -mu * (r.col(t) - r_old);
    Spectral& p = parts[static_cast<std::size_t>(t)];
    p.ss = sx.squaredNorm() + sz.squaredNorm();
    p.sy = sx.dot(dx) + sz.dot(dz);
    p.yy = dx.squaredNorm() + dz.squaredNorm();
  });
  double total = 0.0;
  for (const double v : per_frame) total += v;
  if (spectral != nullptr) {
    *spectral = {};
    for (const Spectral& p : parts) {
      spectral->ss += p.ss;
      spectral->sy += p.sy;
      spectral->yy += p.yy;
    }
  }
  return total;
}

// Adaptive Barzilai-Borwein step; 0 when the curvature estimate is unusable.
double spectral_step(const Spectral& s) {
  if (!(s.sy > 0.0) || !(s.ss > 0.0) || !(s.yy > 0.0)) return 0.0;
  const double steepest = s.ss / s.sy;
  const double min_grad = s.sy / s.yy;
  const double step = 2.0 * min_grad > steepest ? min_grad : steepest - 0.5 * min_grad;
  return std::isfinite(step) && step > 0.0 ? step : 0.0;
}

}  // namespace

RpcaConfig RpcaConfig::resolved(const FrameStack& y) const {
  RpcaConfig out = *this;
  if (!(out.lambda > 0.0)) out.lambda = default_lambda(clique_side, y.pixels());
  if (!(out.epsilon > 0.0)) {
    const double scale = y.values().size() > 0 ? y.values().cwiseAbs().maxCoeff() : 0.0;
    out.epsilon = 1e-4 * std::max(1.0, scale);
  }
  if (!(out.alpha > 0.0)) out.alpha = 1.0 / (out.mu + out.lambda / out.epsilon);
  return out;
}

void RpcaConfig::validate() const {
  if (!(mu > 0.0) || !std::isfinite(mu)) throw ConfigError("rpca: mu must be > 0");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ConfigError("rpca: lambda must be >= 0");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ConfigError("rpca: alpha must be > 0");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ConfigError("rpca: epsilon must be > 0");
  if (max_iters < 1) throw ConfigError("rpca: max_iters must be >= 1");
  if (!(tol_obj >= 0.0)) throw ConfigError("rpca: tol_obj must be >= 0");
  if (clique_side < 1) throw ConfigError("rpca: clique side must be >= 1");
}

Eigen::MatrixXd svt(const Eigen::MatrixXd& q, double delta, int* rank, double* nuclear_norm) {
  if (!(delta >= 0.0)) throw ConfigError("svt: delta must be >= 0");
  if (!q.allFinite()) throw NumericalError("svt: input has non-finite entries");
  Eigen::BDCSVD<Eigen::MatrixXd> svd(q, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) {
    throw NumericalError("svt: SVD failed on a " + std::to_string(q.rows()) + "x" +
                         std::to_string(q.cols()) + " matrix");
  }
  const Eigen::VectorXd shrunk = (svd.singularValues().array() - delta).max(0.0).matrix();
  Eigen::Index keep = 0;
  while (keep < shrunk.size() && shrunk[keep] > 0.0) ++keep;

  if (nuclear_norm != nullptr) *nuclear_norm = shrunk.sum();
  if (rank != nullptr) {
    const double cutoff = keep > 0 ? 1e-8 * shrunk[0] : 0.0;
    *rank = static_cast<int>((shrunk.head(keep).array() > cutoff).count());
  }
  if (keep == 0) return Eigen::MatrixXd::Zero(q.rows(), q.cols());
  return svd.matrixU().leftCols(keep) * shrunk.head(keep).asDiagonal() *
         svd.matrixV().leftCols(keep).transpose();
}

double default_lambda(int side, std::size_t n1) {
  if (side < 1 || n1 < 1) throw ConfigError("default_lambda: need l >= 1 and n1 >= 1");
  return 1.0 / (static_cast<double>(side) * std::sqrt(static_cast<double>(n1)));
}

double rpca_objective(const FrameStack& x, const FrameStack& z, const FrameStack& y, const RpcaConfig& cfg_in) {
  if (x.frame_shape() != y.frame_shape() || z.frame_shape() != y.frame_shape() ||
      x.frames() != y.frames() || z.frames() != y.frames()) {
    throw ShapeError("rpca_objective: X, Z, Y shapes disagree");
  }
  const RpcaConfig cfg = cfg_in.resolved(y);
  const GridShape& shape = y.frame_shape();
  const auto filter = BlockFilter::get(shape.height, shape.width, cfg.clique_side);
  Eigen::BDCSVD<Eigen::MatrixXd> svd(z.values());
  if (svd.info() != Eigen::Success) throw NumericalError("rpca_objective: SVD failed");
  const double nuclear = svd.singularValues().sum();
  const double j_eps = frames_smoothed_sum(*filter, x.values(), cfg.epsilon, cfg.jobs);
  const double fit = (y.values() - z.values() - x.values()).squaredNorm();
  return nuclear + cfg.lambda * j_eps + 0.5 * cfg.mu * fit;
}

RpcaResult solve_rpca(const FrameStack& y, const RpcaConfig& cfg_in, AllocationTracker* tracker) {
  const RpcaConfig cfg = cfg_in.resolved(y);
  cfg.validate();
  if (!y.values().allFinite()) throw ConfigError("rpca: input has non-finite entries");

  Stopwatch clock;
  const GridShape shape = y.frame_shape();
  const auto filter = BlockFilter::get(shape.height, shape.width, cfg.clique_side);
  const auto n = static_cast<Eigen::Index>(y.pixels());
  const auto frames = static_cast<Eigen::Index>(y.frames());
  const Eigen::MatrixXd& yv = y.values();

  AllocationTracker local_tracker;
  AllocationTracker* acct = tracker != nullptr ? tracker : &local_tracker;

  RpcaResult result{FrameStack(shape, static_cast<int>(frames)), FrameStack(shape, static_cast<int>(frames)),
                    {}, 0, cfg};
  SolverReport& report = result.report;

  {
    TrackedMatrix x(acct, "fbs.X", n, frames);
    TrackedMatrix z(acct, "fbs.Z", n, frames);
    TrackedMatrix g(acct, "fbs.grad", n, frames);
    TrackedMatrix r(acct, "fbs.residual", n, frames);

    const double lambda = cfg.lambda;
    const double mu = cfg.mu;
    const bool backtracking = cfg.step == StepPolicy::kBacktracking;

    const double clique_count = static_cast<double>(shape.height - cfg.clique_side + 1) *
                                static_cast<double>(shape.width - cfg.clique_side + 1);
    const double j_zero = clique_count * cfg.epsilon * static_cast<double>(frames);
    const double f_initial = lambda * j_zero + 0.5 * mu * yv.squaredNorm();

    double nuclear = 0.0;
    double alpha = cfg.alpha;
    for (int iter = 1; iter <= cfg.max_iters; ++iter) {
      const bool use_spectral = backtracking && cfg.spectral && iter > 1;
      Spectral sp;
      const double j_now = refresh(*filter, yv, *x, *z, *r, *g, cfg.epsilon, lambda, mu, cfg.jobs, alpha,
                                   use_spectral ? &sp : nullptr);
      const double f_now = lambda * j_now + 0.5 * mu * r->squaredNorm();
      const double obj_now = f_now + nuclear;
      const double g2 = g->squaredNorm();

      double step = backtracking && iter > 1 ? 2.0 * alpha : alpha;
      if (use_spectral) {
        const double bb = spectral_step(sp);
        if (bb > 0.0) step = bb;
      }
      double f_trial = 0.0;
      double nuclear_trial = 0.0;
      int rank_trial = 0;
      for (int halvings = 0;; ++halvings) {
        *x -= step * *g;
        *z += (step * mu) * *r;
        *z = svt(*z, step, &rank_trial, &nuclear_trial);
        const double j_trial = frames_smoothed_sum(*filter, *x, cfg.epsilon, cfg.jobs);
        f_trial = lambda * j_trial + 0.5 * mu * (yv - *z - *x).squaredNorm();
        if (!backtracking) break;

        // x+ - x: dX = -step G, dZ = Z+ - Z_old with Z_old = Y - X_old - R.
        const auto dz = (z->array() - yv.array() + x->array() + step * g->array() + r->array());
        const double inner = -step * g2 - mu * (r->array() * dz).sum();
        const double dist2 = step * step * g2 + dz.square().sum();
        const double bound = f_now + inner + dist2 / (2.0 * step);
        if (std::isfinite(f_trial) && f_trial <= bound + 1e-12 * std::abs(f_now)) break;

        if (halvings >= kMaxHalvings) {
          throw StepFailure("rpca: backtracking failed after 60 halvings");
        }
        *x += step * *g;
        *z = yv - *x - *r;
        step *= kBacktrackBeta;
      }
      alpha = step;
      nuclear = nuclear_trial;
      result.rank = rank_trial;

      const double obj_next = f_trial + nuclear_trial;
      report.iterations = iter;
      report.objective_trace.push_back(obj_next);
      report.residual_trace.push_back((yv - *z - *x).norm());

      if (!std::isfinite(obj_next) || (!backtracking && obj_next > 10.0 * f_initial && f_initial > 0.0)) {
        report.termination = TerminationReason::kDiverged;
        report.note = "objective grew past 10x its starting value; reduce alpha";
        break;
      }
      const double rel_decrease = std::abs(obj_now - obj_next) / std::max(std::abs(obj_now), 1e-300);
      if (rel_decrease < cfg.tol_obj || obj_now == obj_next) {
        report.termination = TerminationReason::kConverged;
        break;
      }
    }

    result.sparse.values() = std::move(*x);
    result.low_rank.values() = std::move(*z);
    result.config.alpha = alpha;
  }

  report.peak_aux_entries = acct->peak();
  report.wall_clock_seconds = clock.seconds();
  return result;
}

}  // namespace blocksparse
