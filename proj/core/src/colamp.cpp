#include "blocksparse/colamp.hpp"

#include "blocksparse/errors.hpp"
#include "blocksparse/regularizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

namespace blocksparse {

MeasurementModel::MeasurementModel(Eigen::MatrixXd phi) : phi_(std::move(phi)) {
  if (phi_.rows() < 1 || phi_.cols() < 1) throw ConfigError("measurement matrix must be non-empty");
  if (!phi_.allFinite()) throw ConfigError("measurement matrix has non-finite entries");
}

Eigen::VectorXd MeasurementModel::apply(const Eigen::VectorXd& x) const {
  if (x.size() != phi_.cols()) throw ShapeError("Phi x: expected " + std::to_string(phi_.cols()) + " entries");
  return phi_ * x;
}

Eigen::VectorXd MeasurementModel::adjoint(const Eigen::VectorXd& y) const {
  if (y.size() != phi_.rows()) throw ShapeError("Phi^T y: expected " + std::to_string(phi_.rows()) + " entries");
  return phi_.transpose() * y;
}

Eigen::MatrixXd MeasurementModel::columns(std::span<const Eigen::Index> support) const {
  Eigen::MatrixXd out(phi_.rows(), static_cast<Eigen::Index>(support.size()));
  for (std::size_t j = 0; j < support.size(); ++j) {
    if (support[j] < 0 || support[j] >= phi_.cols()) throw IndexError("support index out of range");
    out.col(static_cast<Eigen::Index>(j)) = phi_.col(support[j]);
  }
  return out;
}

CgResult cg_solve_normal(const Eigen::MatrixXd& phi_s, const Eigen::VectorXd& y, double tol, int max_it,
                         const Eigen::VectorXd& x0) {
  if (phi_s.cols() < 1) throw ConfigError("cg_solve_normal: empty column set");
  if (phi_s.rows() != y.size()) throw ShapeError("cg_solve_normal: Phi_s rows != len(y)");
  const Eigen::Index n = phi_s.cols();
  if (x0.size() != 0 && x0.size() != n) throw ShapeError("cg_solve_normal: start vector length != cols(Phi_s)");

  CgResult out;
  out.x = Eigen::VectorXd::Zero(n);
  const Eigen::VectorXd b = phi_s.transpose() * y;
  const double b_norm = b.norm();
  if (b_norm == 0.0) return out;

  Eigen::VectorXd x = x0.size() == n ? x0 : Eigen::VectorXd::Zero(n);
  Eigen::VectorXd r = b - phi_s.transpose() * (phi_s * x);
  Eigen::VectorXd p = r;
  double rr = r.squaredNorm();
  double best = std::sqrt(rr);
  out.x = x;
  out.relative_residual = best / b_norm;
  if (best <= tol * b_norm) return out;

  for (int it = 1; it <= max_it; ++it) {
    const Eigen::VectorXd phi_p = phi_s * p;
    const double curvature = phi_p.squaredNorm();
    if (!(curvature > 1e-300)) {
      out.degenerate = true;
      break;
    }
    const double step = rr / curvature;
    x += step * p;
    r -= step * (phi_s.transpose() * phi_p);
    const double rr_next = r.squaredNorm();
    out.iterations = it;
    if (std::sqrt(rr_next) < best) {
      best = std::sqrt(rr_next);
      out.x = x;
      out.relative_residual = best / b_norm;
    }
    if (std::sqrt(rr_next) <= tol * b_norm) return out;
    p = r + (rr_next / rr) * p;
    rr = rr_next;
  }
  out.degenerate = out.degenerate || out.relative_residual > tol;
  return out;
}

Eigen::VectorXd truncate_top_k(const Eigen::VectorXd& x, int k) {
  if (k < 1) throw ConfigError("truncate_top_k: K must be >= 1");
  if (x.size() <= k) return x;
  std::vector<Eigen::Index> order(static_cast<std::size_t>(x.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return std::abs(x[a]) > std::abs(x[b]); });
  Eigen::VectorXd out = Eigen::VectorXd::Zero(x.size());
  for (int i = 0; i < k; ++i) out[order[static_cast<std::size_t>(i)]] = x[order[static_cast<std::size_t>(i)]];
  return out;
}

void ColampConfig::validate() const {
  if (k < 1) throw ConfigError("colamp: K must be >= 1");
  if (!(lambda0 >= 0.0)) throw ConfigError("colamp: lambda0 must be >= 0");
  if (!(lambda_growth >= 1.0)) throw ConfigError("colamp: lambda growth must be >= 1");
  if (max_iters < 1) throw ConfigError("colamp: max_iters must be >= 1");
  if (!(cg_tol > 0.0)) throw ConfigError("colamp: cg tolerance must be > 0");
  if (support_top < 0) throw ConfigError("colamp: support_top must be >= 0");
  prox.validate();
}

namespace {

std::vector<Eigen::Index> support_of(const Eigen::VectorXd& x, int top) {
  std::vector<Eigen::Index> s;
  if (top > 0) {
    const Eigen::VectorXd kept = truncate_top_k(x, top);
    for (Eigen::Index i = 0; i < kept.size(); ++i) {
      if (kept[i] != 0.0) s.push_back(i);
    }
    return s;
  }
  const double cutoff = 1e-10 * x.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (std::abs(x[i]) > cutoff) s.push_back(i);
  }
  return s;
}

}  // namespace

ColampResult colamp_solve(const Eigen::VectorXd& y, const MeasurementModel& phi, const CliqueSystem& cs,
                          const ColampConfig& cfg, const PursuitObserver& observer) {
  cfg.validate();
  if (static_cast<std::size_t>(phi.cols()) != cs.shape().size()) {
    throw ShapeError("colamp: Phi has " + std::to_string(phi.cols()) + " columns, grid has " +
                     std::to_string(cs.shape().size()) + " pixels");
  }
  if (y.size() != phi.rows()) throw ShapeError("colamp: len(y) != rows(Phi)");

  Stopwatch clock;
  ColampResult result{ImageGrid(cs.shape()), {}, {}};
  SolverReport& report = result.report;
  const double residual_tol = cfg.residual_tol >= 0.0 ? cfg.residual_tol : 1e-10 * y.norm();

  Eigen::VectorXd& x = result.x.values();
  Eigen::VectorXd r = y;
  report.termination = TerminationReason::kMaxIterations;

  if (r.norm() <= residual_tol) {
    report.termination = TerminationReason::kConverged;
    return result;
  }

  for (int n = 0; n < cfg.max_iters; ++n) {
    double lambda = cfg.lambda0 * std::pow(cfg.lambda_growth, n);

    const ImageGrid v(cs.shape(), phi.adjoint(r) + x);
    ProxConfig pc = cfg.prox;
    pc.lambda = lambda;
    ProxResult reg = prox_J(v, cs, pc, &result.x);
    std::vector<Eigen::Index> support = support_of(reg.x.values(), cfg.support_top);
    if (support.empty()) {
      lambda *= 0.5;
      pc.lambda = lambda;
      reg = prox_J(v, cs, pc, &result.x);
      support = support_of(reg.x.values(), cfg.support_top);
      if (support.empty()) {
        report.termination = TerminationReason::kSupportCollapse;
        report.note = "prox output empty after halving lambda";
        break;
      }
    }

    const Eigen::MatrixXd phi_s = phi.columns(support);
    Eigen::VectorXd start(static_cast<Eigen::Index>(support.size()));
    for (std::size_t j = 0; j < support.size(); ++j) start[static_cast<Eigen::Index>(j)] = x[support[j]];
    const CgResult ls = cg_solve_normal(phi_s, y, cfg.cg_tol, 4 * static_cast<int>(support.size()), start);
    const Eigen::VectorXd xs = truncate_top_k(ls.x, cfg.k);
    x.setZero();
    for (std::size_t j = 0; j < support.size(); ++j) x[support[j]] = xs[static_cast<Eigen::Index>(j)];
    r = y - phi.apply(x);

    const double r_norm = r.norm();
    report.iterations = n + 1;
    report.residual_trace.push_back(r_norm);
    report.objective_trace.push_back(r_norm * r_norm + lambda * eval_J(result.x, cs));
    result.lambdas.push_back(lambda);

    if (observer) {
      observer(PursuitState{n, lambda, &x, &r, &reg.x.values(), support, ls.degenerate});
    }
    if (r_norm <= residual_tol) {
      report.termination = TerminationReason::kConverged;
      break;
    }
  }

  report.wall_clock_seconds = clock.seconds();
  return result;
}

}  // namespace blocksparse
