#include "blocksparse/prox_admm.hpp"

#include "blocksparse/errors.hpp"
#include "blocksparse/regularizer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace blocksparse {

void ProxConfig::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ConfigError("prox: lambda must be >= 0");
  if (!std::isfinite(rho)) throw ConfigError("prox: rho must be finite");
  if (max_iters < 1) throw ConfigError("prox: max_iters must be >= 1");
  if (!(tol_abs >= 0.0) || !(tol_rel >= 0.0)) throw ConfigError("prox: tolerances must be >= 0");
}

Eigen::VectorXd group_shrink(const Eigen::VectorXd& v, double tau) {
  const double norm = v.norm();
  if (norm == 0.0 || norm <= tau) return Eigen::VectorXd::Zero(v.size());
  return (1.0 - tau / norm) * v;
}

ProxResult prox_J(const ImageGrid& v, const CliqueSystem& cs, const ProxConfig& cfg,
                  const ImageGrid* warm_start, AllocationTracker* tracker) {
  cfg.validate();
  if (v.shape() != cs.shape()) throw ShapeError("prox_J: input shape does not match clique system");
  if (warm_start != nullptr && warm_start->shape() != cs.shape()) {
    throw ShapeError("prox_J: warm start shape does not match clique system");
  }

  Stopwatch clock;
  ProxResult result{ImageGrid(v.shape()), {}, {}, {}};
  SolverReport& report = result.report;

  if (cfg.lambda == 0.0) {
    result.x = v;
    report.termination = TerminationReason::kConverged;
    return result;
  }

  AllocationTracker local_tracker;
  AllocationTracker* acct = tracker != nullptr ? tracker : &local_tracker;

  const auto n = static_cast<Eigen::Index>(cs.shape().size());
  const auto s = static_cast<Eigen::Index>(cs.subset_count());
  const std::size_t csize = cs.clique_size();
  const double rho = cfg.effective_rho();
  const double tau = cfg.lambda / rho;

  Eigen::VectorXd& x = result.x.values();
  x = warm_start != nullptr ? warm_start->values() : v.values();

  TrackedMatrix z(acct, "admm.z", n, s);
  TrackedMatrix u(acct, "admm.u", n, s);
  for (Eigen::Index i = 0; i < s; ++i) z->col(i) = x;

  // Subset (a, b) covers row r iff the unique corner row r0 = a (mod l) with
  // r0 <= r < r0 + l is a valid corner; columns likewise.
  const int side = cs.side();
  const int height = cs.shape().height;
  const int width = cs.shape().width;
  auto covered = [side](int coord, int offset, int extent) {
    const int r0 = coord - ((coord - offset) % side + side) % side;
    return r0 >= 0 && r0 <= extent - side;
  };

  const double sqrt_sn = std::sqrt(static_cast<double>(s * n));
  Eigen::VectorXd clique_vals(static_cast<Eigen::Index>(csize));

  for (int iter = 1; iter <= cfg.max_iters; ++iter) {
    x = (2.0 * v.values() + rho * (z->rowwise().sum() + u->rowwise().sum())) /
        (2.0 + static_cast<double>(s) * rho);

    double dz2 = 0.0;
    for (Eigen::Index i = 0; i < s; ++i) {
      auto zi = z->col(i);
      auto ui = u->col(i);
      const int a = static_cast<int>(i) / side;
      const int b = static_cast<int>(i) % side;
      for (int r = 0; r < height; ++r) {
        const bool row_cov = covered(r, a, height);
        for (int c = 0; c < width; ++c) {
          if (row_cov && covered(c, b, width)) continue;
          const auto p = static_cast<Eigen::Index>(cs.shape().index(r, c));
          const double next = x[p] - ui[p];
          dz2 += (next - zi[p]) * (next - zi[p]);
          zi[p] = next;
        }
      }
      for (const std::size_t cid : cs.subset(static_cast<std::size_t>(i))) {
        const auto idx = cs.indices(cid);
        for (std::size_t k = 0; k < csize; ++k) {
          const auto p = static_cast<Eigen::Index>(idx[k]);
          clique_vals[static_cast<Eigen::Index>(k)] = x[p] - ui[p];
        }
        const Eigen::VectorXd shrunk = group_shrink(clique_vals, tau);
        for (std::size_t k = 0; k < csize; ++k) {
          const auto p = static_cast<Eigen::Index>(idx[k]);
          const double next = shrunk[static_cast<Eigen::Index>(k)];
          dz2 += (next - zi[p]) * (next - zi[p]);
          zi[p] = next;
        }
      }
    }

    double primal2 = 0.0;
    for (Eigen::Index i = 0; i < s; ++i) {
      const Eigen::VectorXd r = z->col(i) - x;
      primal2 += r.squaredNorm();
      u->col(i) += r;
    }

    const double primal = std::sqrt(primal2);
    const double dual = rho * std::sqrt(dz2);
    const double eps_pri =
        sqrt_sn * cfg.tol_abs +
        cfg.tol_rel * std::max(std::sqrt(static_cast<double>(s)) * x.norm(), z->norm());
    const double eps_dual = sqrt_sn * cfg.tol_abs + cfg.tol_rel * rho * u->norm();

    report.iterations = iter;
    report.objective_trace.push_back((x - v.values()).squaredNorm() + cfg.lambda * eval_J(result.x, cs));
    report.residual_trace.push_back(std::sqrt(primal2 + dz2));
    result.primal_residuals.push_back(primal);
    result.dual_residuals.push_back(dual);

    if (primal <= eps_pri && dual <= eps_dual) {
      report.termination = TerminationReason::kConverged;
      break;
    }
  }

  // Cliques the last shrinkage zeroed are exactly zero at the optimum.
  for (Eigen::Index i = 0; i < s; ++i) {
    for (const std::size_t cid : cs.subset(static_cast<std::size_t>(i))) {
      const auto idx = cs.indices(cid);
      const bool zeroed = std::all_of(idx.begin(), idx.end(), [&](std::size_t p) {
        return (*z)(static_cast<Eigen::Index>(p), i) == 0.0;
      });
      if (!zeroed) continue;
      for (const std::size_t p : idx) x[static_cast<Eigen::Index>(p)] = 0.0;
    }
  }

  report.wall_clock_seconds = clock.seconds();
  report.peak_aux_entries = acct->peak();
  return result;
}

FramewiseProxResult prox_J_framewise(const FrameStack& v, const CliqueSystem& cs, const ProxConfig& cfg,
                                     int jobs) {
  cfg.validate();
  if (v.frame_shape() != cs.shape()) throw ShapeError("prox_J_framewise: frame shape mismatch");
  const int frames = v.frames();
  FramewiseProxResult out{FrameStack(v.frame_shape(), frames), std::vector<SolverReport>(static_cast<std::size_t>(frames))};

  parallel_for(frames, jobs, [&](int t) {
    ProxResult r = prox_J(v.frame(t), cs, cfg);
    out.frames.values().col(t) = r.x.values();
    out.reports[static_cast<std::size_t>(t)] = std::move(r.report);
  });
  return out;
}

}  // namespace blocksparse
