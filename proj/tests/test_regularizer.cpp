#include "blocksparse/block_filter.hpp"
#include "blocksparse/errors.hpp"
#include "blocksparse/regularizer.hpp"
#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace blocksparse;

namespace {

ImageGrid random_grid(GridShape s, std::mt19937_64& rng) {
  return ImageGrid(s, oracle::random_vector(static_cast<Eigen::Index>(s.size()), rng));
}

}  // namespace

TEST(EvalJ, Examples) {
  const CliqueSystem whole({2, 2}, 2);
  EXPECT_EQ(eval_J(ImageGrid({2, 2}), whole), 0.0);
  EXPECT_DOUBLE_EQ(eval_J(ImageGrid({2, 2}, Eigen::Vector4d(3, 4, 0, 0)), whole), 5.0);

  const CliqueSystem cs({3, 3}, 2);
  EXPECT_DOUBLE_EQ(eval_J(ImageGrid({3, 3}, Eigen::VectorXd::Ones(9)), cs), 8.0);
}

TEST(EvalJ, ShapeMismatchThrows) {
  const CliqueSystem cs({3, 3}, 2);
  EXPECT_THROW((void)eval_J(ImageGrid({4, 3}), cs), ShapeError);
  EXPECT_THROW((void)eval_J_eps(ImageGrid({4, 3}), cs, SmoothingParam(0.1)), ShapeError);
}

TEST(EvalJEps, Examples) {
  const CliqueSystem cs({3, 3}, 2);
  EXPECT_NEAR(eval_J_eps(ImageGrid({3, 3}), cs, SmoothingParam(0.1)), 0.4, 1e-15);

  const CliqueSystem whole({2, 2}, 2);
  const ImageGrid x({2, 2}, Eigen::Vector4d(3, 4, 0, 0));
  EXPECT_DOUBLE_EQ(eval_J_eps(x, whole, SmoothingParam(1.0)), std::sqrt(26.0));
}

TEST(EvalJEps, ZeroEpsMatchesEvalJ) {
  std::mt19937_64 rng(3);
  const CliqueSystem cs({5, 5}, 2);
  const ImageGrid x = random_grid({5, 5}, rng);
  EXPECT_NEAR(eval_J_eps(x, cs, SmoothingParam(0.0)), eval_J(x, cs), 1e-12);
}

TEST(EvalJEps, FftPathMatchesDirect) {
  std::mt19937_64 rng(4);
  for (int side : {1, 2, 3, 5}) {
    const CliqueSystem cs({11, 9}, side);
    const ImageGrid x = random_grid({11, 9}, rng);
    const double direct = eval_J_eps(x, cs, SmoothingParam(0.05));
    EXPECT_NEAR(eval_J_eps_fft(x, cs, SmoothingParam(0.05)), direct, 1e-10 * direct);
  }
}

TEST(EvalJ, MatchesBruteForcePatches) {
  std::mt19937_64 rng(5);
  for (int side : {1, 2, 4}) {
    const CliqueSystem cs({7, 6}, side);
    const ImageGrid x = random_grid({7, 6}, rng);
    EXPECT_NEAR(eval_J(x, cs), oracle::group_norm_sum(x.values(), oracle::patches(7, 6, side)), 1e-12);
  }
}

TEST(EvalJ, ConvexityAndHomogeneity) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const CliqueSystem cs({6, 6}, 3);
  for (int trial = 0; trial < 50; ++trial) {
    const ImageGrid x = random_grid({6, 6}, rng);
    const ImageGrid y = random_grid({6, 6}, rng);
    const double t = unit(rng);
    const ImageGrid mix({6, 6}, t * x.values() + (1 - t) * y.values());
    EXPECT_LE(eval_J(mix, cs), t * eval_J(x, cs) + (1 - t) * eval_J(y, cs) + 1e-10);

    const double a = 4.0 * unit(rng) - 2.0;
    const ImageGrid ax({6, 6}, a * x.values());
    EXPECT_NEAR(eval_J(ax, cs), std::abs(a) * eval_J(x, cs), 1e-12 * std::max(1.0, eval_J(x, cs)));
  }
}

TEST(EvalJEps, SmoothingBound) {
  std::mt19937_64 rng(8);
  for (double eps : {1e-3, 0.1, 2.0}) {
    const CliqueSystem cs({6, 7}, 2);
    const ImageGrid x = random_grid({6, 7}, rng);
    const double gap = eval_J_eps(x, cs, SmoothingParam(eps)) - eval_J(x, cs);
    EXPECT_GE(gap, 0.0);
    EXPECT_LE(gap, static_cast<double>(cs.clique_count()) * eps + 1e-12);
  }
}

TEST(GradJEps, ZeroEpsThrows) {
  const CliqueSystem cs({3, 3}, 2);
  EXPECT_THROW((void)grad_J_eps_naive(ImageGrid({3, 3}), cs, SmoothingParam(0.0)), ConfigError);
  EXPECT_THROW((void)grad_J_eps_fft(ImageGrid({3, 3}), cs, SmoothingParam(0.0)), ConfigError);
  EXPECT_THROW(SmoothingParam(-1.0), ConfigError);
}

TEST(GradJEps, Examples) {
  const CliqueSystem cs({4, 4}, 2);
  EXPECT_TRUE(grad_J_eps_naive(ImageGrid({4, 4}), cs, SmoothingParam(0.1)).values().isZero(0.0));
  EXPECT_TRUE(grad_J_eps_fft(ImageGrid({4, 4}), cs, SmoothingParam(0.1)).values().isZero(1e-14));

  // A single clique holding (3, 4): grad -> (3, 4) / 5.
  const CliqueSystem pair({2, 2}, 2);
  const ImageGrid x({2, 2}, Eigen::Vector4d(3, 4, 0, 0));
  const ImageGrid g = grad_J_eps_naive(x, pair, SmoothingParam(1e-9));
  EXPECT_NEAR(g.values()[0], 0.6, 1e-12);
  EXPECT_NEAR(g.values()[1], 0.8, 1e-12);
  EXPECT_NEAR(grad_J_eps_fft(x, pair, SmoothingParam(1e-9)).values()[1], 0.8, 1e-10);
}

TEST(GradJEps, NaiveMatchesFiniteDifferences) {
  std::mt19937_64 rng(9);
  const CliqueSystem cs({6, 6}, 2);
  const ImageGrid x = random_grid({6, 6}, rng);
  const SmoothingParam sp(0.1);
  const auto f = [&](const Eigen::VectorXd& v) { return eval_J_eps(ImageGrid({6, 6}, v), cs, sp); };
  const Eigen::VectorXd fd = oracle::central_diff(f, x.values(), 1e-6 * x.values().cwiseAbs().maxCoeff());
  EXPECT_LT(oracle::rel(grad_J_eps_naive(x, cs, sp).values(), fd), 1e-5);
}

TEST(GradJEps, FftMatchesNaive) {
  std::mt19937_64 rng(10);
  for (int side : {2, 4, 8}) {
    const CliqueSystem cs({16, 16}, side);
    const ImageGrid x = random_grid({16, 16}, rng);
    const SmoothingParam sp(0.05);
    EXPECT_LT(oracle::rel(grad_J_eps_fft(x, cs, sp).values(), grad_J_eps_naive(x, cs, sp).values()), 1e-10)
        << "side " << side;
  }
}

TEST(GradJEps, NaiveMatchesBruteForce) {
  std::mt19937_64 rng(11);
  const CliqueSystem cs({5, 8}, 3);
  const ImageGrid x = random_grid({5, 8}, rng);
  const Eigen::VectorXd ref = oracle::smoothed_grad(x.values(), oracle::patches(5, 8, 3), 0.2);
  EXPECT_LT(oracle::rel(grad_J_eps_naive(x, cs, SmoothingParam(0.2)).values(), ref), 1e-13);
}

TEST(SmoothingParam, RelativeToScale) {
  Eigen::MatrixXd small = Eigen::MatrixXd::Constant(2, 2, 0.5);
  EXPECT_DOUBLE_EQ(SmoothingParam::relative_to(small).epsilon, 1e-4);
  Eigen::MatrixXd big = Eigen::MatrixXd::Constant(2, 2, -30.0);
  EXPECT_DOUBLE_EQ(SmoothingParam::relative_to(big).epsilon, 3e-3);
}

TEST(BlockFilter, SmoothSizesAreSevenSmooth) {
  EXPECT_EQ(next_fast_fft_size(1), 1);
  EXPECT_EQ(next_fast_fft_size(11), 12);
  EXPECT_EQ(next_fast_fft_size(13), 14);
  EXPECT_EQ(next_fast_fft_size(64), 64);
  EXPECT_EQ(next_fast_fft_size(97), 98);
}

TEST(BlockFilter, CliqueSumsAndAdjoint) {
  std::mt19937_64 rng(12);
  const int h = 9;
  const int w = 7;
  const int side = 3;
  const auto filter = BlockFilter::get(h, w, side);
  const Eigen::VectorXd img = oracle::random_vector(h * w, rng);
  Eigen::VectorXd sums((h - side + 1) * (w - side + 1));
  filter->clique_sums({img.data(), static_cast<std::size_t>(img.size())}, {sums.data(), static_cast<std::size_t>(sums.size())});
  const auto ps = oracle::patches(h, w, side);
  ASSERT_EQ(ps.size(), static_cast<std::size_t>(sums.size()));
  for (std::size_t c = 0; c < ps.size(); ++c) {
    double s = 0.0;
    for (int i : ps[c]) s += img[i];
    EXPECT_NEAR(sums[static_cast<Eigen::Index>(c)], s, 1e-12);
  }

  const Eigen::VectorXd corner = oracle::random_vector(sums.size(), rng);
  Eigen::VectorXd back(h * w);
  filter->scatter_sums({corner.data(), static_cast<std::size_t>(corner.size())}, {back.data(), static_cast<std::size_t>(back.size())});
  EXPECT_NEAR(sums.dot(corner), img.dot(back), 1e-11);
  EXPECT_EQ(BlockFilter::get(h, w, side).get(), filter.get());
}
