#pragma once

#include "blocksparse/grid.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <string_view>

namespace blocksparse::harness {

using Rng = std::mt19937_64;

/// Independent stream for (master seed, trial, purpose). Results never depend
/// on which thread runs a trial.
Rng trial_rng(std::uint64_t master_seed, int trial, int stream = 0);


enum class SyntheticKind { kBlockySparse, kPhantom, kLowRankPlusBlockSparse, kPiecewiseConstant };

std::string_view to_string(SyntheticKind kind);

struct SyntheticSpec {
  SyntheticKind kind = SyntheticKind::kBlockySparse;
  GridShape shape{32, 32};
  int frames = 1;           // stack kinds only
  int k = 40;               // support size (per frame for stacks)
  int blocks = 4;           // disjoint blobs sharing the k support pixels
  int block_rows = 0;       // blob height; 0 picks a near-square blob
  int rank = 2;             // low-rank component
  double amplitude_min = 1.0;
  double amplitude_max = 2.0;
  int measurements = 0;     // rows of a Gaussian Phi; 0 observes the signal directly
  double snr_db = std::numeric_limits<double>::infinity();  // measurement SNR
  double noise_sigma = 0.0;  // used when snr_db is infinite
  std::uint64_t seed = 0;
  int trial = 0;

  void validate() const;
};

struct SyntheticData {
  FrameStack truth;            // ground truth signal (one column for images)
  FrameStack low_rank;         // planted background (stacks only)
  FrameStack sparse;           // planted foreground (stacks only)
  Eigen::MatrixXd phi;         // M x N measurement matrix; empty for direct observation
  Eigen::MatrixXd observation; // Phi x0 + noise (M x 1), or noisy signal (N x L)
  double noise_sigma = 0.0;
};

/// Ground truth and observation, bit-for-bit reproducible from (spec, seed, trial).
SyntheticData gen_synthetic(const SyntheticSpec& spec);

/// Places `blocks` disjoint blobs with k pixels in total, at least one pixel
/// apart (8-neighbourhood). Each blob has one random sign and per-pixel
/// magnitudes uniform in [amplitude_min, amplitude_max].
ImageGrid blocky_sparse_image(const SyntheticSpec& spec, Rng& rng);

/// Sum of random ellipses with random intensities, clipped to [0, 1].
ImageGrid ellipse_phantom(GridShape shape, Rng& rng);

/// Random axis-aligned rectangles over a background, values in [0, 1].
ImageGrid piecewise_constant_image(GridShape shape, Rng& rng);

/// M x N with i.i.d. N(0, 1/M) entries.
Eigen::MatrixXd gaussian_matrix(int m, int n, Rng& rng);

/// sigma such that mean(signal^2) / sigma^2 equals 10^(snr_db / 10).
double sigma_for_snr(const Eigen::MatrixXd& signal, double snr_db);

}  // namespace blocksparse::harness
