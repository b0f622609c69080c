#include "blocksparse/errors.hpp"
#include "blocksparse/solver_common.hpp"

#include <gtest/gtest.h>

#include <atomic>
#include <stdexcept>
#include <vector>

using namespace blocksparse;

TEST(BacktrackStep, ExactMinimizerStepAccepted) {
  const auto f = [](const Eigen::VectorXd& x) { return 0.5 * x.squaredNorm(); };
  const Eigen::VectorXd x = Eigen::Vector3d(1, -2, 0.5);
  EXPECT_EQ(backtrack_step(f, x, x, 1.0), 1.0);
}

TEST(BacktrackStep, ScalesWithCurvature) {
  for (double a : {10.0, 1e3, 1e6}) {
    const auto f = [a](const Eigen::VectorXd& x) { return 0.5 * a * x.squaredNorm(); };
    const Eigen::VectorXd x = Eigen::Vector2d(1, 1);
    const double alpha = backtrack_step(f, x, a * x, 1e9);
    EXPECT_GE(alpha, 0.5 / a);
    EXPECT_LE(alpha, 2.0 / a);
  }
}

TEST(BacktrackStep, ZeroGradientAndErrors) {
  const auto f = [](const Eigen::VectorXd& x) { return x.squaredNorm(); };
  const Eigen::VectorXd x = Eigen::Vector2d(1, 1);
  EXPECT_EQ(backtrack_step(f, x, Eigen::Vector2d::Zero(), 3.0), 3.0);
  // Uphill direction, large enough that the smallest trial step is still visible.
  EXPECT_THROW((void)backtrack_step(f, x, Eigen::VectorXd(-1e20 * x), 1.0), StepFailure);
  EXPECT_THROW((void)backtrack_step(f, x, x, 0.0), ConfigError);
}

TEST(AllocationTracker, PeakAndReset) {
  AllocationTracker t;
  EXPECT_EQ(t.peak(), 0u);
  t.account("a", 10);
  t.account("b", 5);
  t.release("a", 10);
  t.account("c", 7);
  EXPECT_EQ(t.current(), 12u);
  EXPECT_EQ(t.peak(), 15u);
  EXPECT_EQ(t.live_by_tag().at("c"), 7u);
  t.reset();
  EXPECT_EQ(t.peak(), 0u);
  EXPECT_EQ(t.current(), 0u);
}

TEST(TrackedMatrix, RegistersLifetime) {
  AllocationTracker t;
  {
    TrackedMatrix m(&t, "buf", 6, 4);
    EXPECT_EQ(m->size(), 24);
    EXPECT_EQ(t.current(), 24u);
    TrackedMatrix untracked(nullptr, "free", 3, 3);
    EXPECT_EQ(t.current(), 24u);
  }
  EXPECT_EQ(t.current(), 0u);
  EXPECT_EQ(t.peak(), 24u);
}

TEST(ParallelFor, EachIndexOnce) {
  for (int jobs : {1, 3, 8}) {
    std::vector<std::atomic<int>> hits(50);
    parallel_for(50, jobs, [&](int i) { ++hits[static_cast<std::size_t>(i)]; });
    for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
  }
}

TEST(ParallelFor, PropagatesErrors) {
  EXPECT_THROW(parallel_for(10, 4, [](int i) {
                 if (i == 6) throw std::runtime_error("boom");
               }),
               std::runtime_error);
}

TEST(TerminationReason, Names) {
  EXPECT_EQ(to_string(TerminationReason::kConverged), "converged");
  EXPECT_EQ(to_string(TerminationReason::kMaxIterations), "max-iterations");
  EXPECT_EQ(to_string(TerminationReason::kDiverged), "diverged");
  EXPECT_EQ(to_string(TerminationReason::kSupportCollapse), "support-collapse");
}
