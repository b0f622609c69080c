#include "blocksparse/colamp.hpp"
#include "blocksparse/errors.hpp"
#include "blocksparse/harness/synthetic.hpp"
#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

using namespace blocksparse;

namespace {

harness::SyntheticData blocky(int m, int trial, double snr_db = std::numeric_limits<double>::infinity()) {
  harness::SyntheticSpec spec;
  spec.k = 40;
  spec.blocks = 4;
  spec.amplitude_min = 28.0;
  spec.amplitude_max = 56.0;
  spec.measurements = m;
  spec.snr_db = snr_db;
  spec.seed = 11;
  spec.trial = trial;
  return harness::gen_synthetic(spec);
}

std::vector<Eigen::Index> top_indices(const Eigen::VectorXd& v, int k) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(v.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return std::abs(v[a]) > std::abs(v[b]); });
  order.resize(static_cast<std::size_t>(k));
  std::sort(order.begin(), order.end());
  return order;
}

}  // namespace

TEST(MeasurementModel, AdjointConsistency) {
  std::mt19937_64 rng(1);
  const MeasurementModel phi(oracle::random_vector(12 * 30, rng).reshaped(12, 30));
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::VectorXd x = oracle::random_vector(30, rng);
    const Eigen::VectorXd y = oracle::random_vector(12, rng);
    EXPECT_NEAR(phi.apply(x).dot(y), x.dot(phi.adjoint(y)), 1e-10);
  }
  EXPECT_THROW((void)phi.apply(Eigen::VectorXd::Zero(29)), ShapeError);
  EXPECT_THROW((void)phi.adjoint(Eigen::VectorXd::Zero(13)), ShapeError);
  const std::vector<Eigen::Index> bad{30};
  EXPECT_THROW((void)phi.columns(bad), IndexError);
}

TEST(CgSolveNormal, Examples) {
  const Eigen::VectorXd y = Eigen::Vector3d(1, -2, 5);
  EXPECT_LT((cg_solve_normal(Eigen::MatrixXd::Identity(3, 3), y, 1e-12, 10).x - y).norm(), 1e-12);

  std::mt19937_64 rng(2);
  const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(oracle::random_vector(8 * 3, rng).reshaped(8, 3))
                                .householderQ() * Eigen::MatrixXd::Identity(8, 3);
  const Eigen::VectorXd b = oracle::random_vector(8, rng);
  EXPECT_LT((cg_solve_normal(q, b, 1e-12, 10).x - q.transpose() * b).norm(), 1e-12);
}

TEST(CgSolveNormal, MatchesDenseSolve) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::MatrixXd a = oracle::random_vector(20 * 5, rng).reshaped(20, 5);
    const Eigen::VectorXd y = oracle::random_vector(20, rng);
    const Eigen::VectorXd dense = (a.transpose() * a).ldlt().solve(a.transpose() * y);
    const CgResult cg = cg_solve_normal(a, y, 1e-14, 50);
    EXPECT_LT(oracle::rel(cg.x, dense), 1e-8);
    EXPECT_FALSE(cg.degenerate);
  }
}

TEST(CgSolveNormal, RankDeficientFlagged) {
  Eigen::MatrixXd a(4, 3);
  a << 1, 2, 2, 0, 1, 1, 3, 0, 0, 1, 1, 1;
  const CgResult r = cg_solve_normal(a, Eigen::Vector4d(1, 2, 3, 4), 1e-14, 20);
  EXPECT_TRUE(r.degenerate || r.relative_residual < 1e-10);
  EXPECT_TRUE(r.x.allFinite());
  EXPECT_THROW((void)cg_solve_normal(Eigen::MatrixXd(4, 0), Eigen::Vector4d::Zero(), 1e-8, 5), ConfigError);
}

TEST(TruncateTopK, Examples) {
  const Eigen::Vector3d x(5, -7, 2);
  EXPECT_EQ(truncate_top_k(x, 3), x);
  EXPECT_EQ(truncate_top_k(x, 2), Eigen::Vector3d(5, -7, 0));
  EXPECT_EQ(truncate_top_k(Eigen::Vector3d(1, -1, 1), 2), Eigen::Vector3d(1, -1, 0));
  EXPECT_THROW((void)truncate_top_k(x, 0), ConfigError);
}

TEST(Colamp, IdentityMeasurementsRecoverExactly) {
  harness::SyntheticSpec spec;
  spec.seed = 2;
  const harness::SyntheticData d = harness::gen_synthetic(spec);
  const Eigen::VectorXd y = d.truth.values().col(0);
  const CliqueSystem cs(spec.shape, 2);
  ColampConfig cfg;
  cfg.k = 40;
  cfg.lambda0 = 1e-3;
  const ColampResult r = colamp_solve(y, MeasurementModel(Eigen::MatrixXd::Identity(1024, 1024)), cs, cfg);
  EXPECT_LT((r.x.values() - y).norm(), 1e-10 * y.norm());
  EXPECT_LE(r.report.iterations, 2);
  EXPECT_EQ(r.report.termination, TerminationReason::kConverged);
}

TEST(Colamp, ZeroObservationStopsImmediately) {
  std::mt19937_64 rng(4);
  const CliqueSystem cs({8, 8}, 2);
  const MeasurementModel phi(oracle::random_vector(20 * 64, rng).reshaped(20, 64));
  ColampConfig cfg;
  cfg.k = 4;
  const ColampResult r = colamp_solve(Eigen::VectorXd::Zero(20), phi, cs, cfg);
  EXPECT_TRUE(r.x.values().isZero(0.0));
  EXPECT_EQ(r.report.iterations, 0);
  EXPECT_EQ(r.report.termination, TerminationReason::kConverged);
}

TEST(Colamp, RejectsBadInputs) {
  const CliqueSystem cs({8, 8}, 2);
  const MeasurementModel phi(Eigen::MatrixXd::Ones(10, 64));
  ColampConfig cfg;
  cfg.k = 0;
  EXPECT_THROW((void)colamp_solve(Eigen::VectorXd::Zero(10), phi, cs, cfg), ConfigError);
  cfg.k = 3;
  cfg.lambda_growth = 0.9;
  EXPECT_THROW((void)colamp_solve(Eigen::VectorXd::Zero(10), phi, cs, cfg), ConfigError);
  cfg.lambda_growth = 1.0;
  EXPECT_THROW((void)colamp_solve(Eigen::VectorXd::Zero(9), phi, cs, cfg), ShapeError);
  EXPECT_THROW((void)colamp_solve(Eigen::VectorXd::Zero(10), phi, CliqueSystem({8, 7}, 2), cfg), ShapeError);
}

TEST(Colamp, IterationInvariants) {
  const harness::SyntheticData d = blocky(120, 0);
  const CliqueSystem cs({32, 32}, 2);
  const MeasurementModel phi(d.phi);
  const Eigen::VectorXd y = d.observation.col(0);
  ColampConfig cfg;
  cfg.k = 40;
  cfg.max_iters = 12;
  double last_lambda = 0.0;
  int calls = 0;
  (void)colamp_solve(y, phi, cs, cfg, [&](const PursuitState& s) {
    ++calls;
    EXPECT_LE((*s.r - (y - phi.apply(*s.x))).norm(), 1e-10 * std::max(1.0, y.norm()));
    EXPECT_LE((s.x->array() != 0.0).count(), 40);
    const std::set<Eigen::Index> sup(s.support.begin(), s.support.end());
    for (Eigen::Index i = 0; i < s.x->size(); ++i) {
      if ((*s.x)[i] != 0.0) EXPECT_TRUE(sup.count(i)) << "pixel " << i << " outside prox support";
    }
    EXPECT_GE(s.lambda, last_lambda);
    last_lambda = s.lambda;
  });
  EXPECT_GT(calls, 0);
}

TEST(Colamp, FirstSupportMatchesCosampProxy) {
  // l = 1 and lambda -> 0: the first support is the 2K largest of |Phi^T y|.
  const int k = 10;
  int same = 0;
  const int trials = 20;
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < trials; ++trial) {
    const Eigen::MatrixXd a = harness::gaussian_matrix(5 * k, 256, rng);
    Eigen::VectorXd x0 = Eigen::VectorXd::Zero(256);
    for (int i = 0; i < k; ++i) x0[std::uniform_int_distribution<int>(0, 255)(rng)] = 1.0 + i;
    const Eigen::VectorXd y = a * x0;
    ColampConfig cfg;
    cfg.k = k;
    cfg.lambda0 = 1e-9;
    cfg.max_iters = 1;
    cfg.support_top = 2 * k;
    std::vector<Eigen::Index> first;
    (void)colamp_solve(y, MeasurementModel(a), CliqueSystem({16, 16}, 1), cfg,
                       [&](const PursuitState& s) { first.assign(s.support.begin(), s.support.end()); });
    std::sort(first.begin(), first.end());
    same += first == top_indices(a.transpose() * y, 2 * k);
  }
  EXPECT_GE(same, 18);
}

TEST(Colamp, RecoversAtFiveK) {
  const harness::SyntheticData d = blocky(200, 1);
  ColampConfig cfg;
  cfg.k = 40;
  const ColampResult r = colamp_solve(d.observation.col(0), MeasurementModel(d.phi), CliqueSystem({32, 32}, 2), cfg);
  EXPECT_LT((r.x.values() - d.truth.values().col(0)).norm(), 1e-3 * d.truth.values().norm());
}
