#pragma once

#include <memory>
#include <span>

namespace blocksparse {

/// Block (all-ones l x l) filtering of H x W row-major images via FFTs.
///
/// clique_sums is the valid-mode correlation: out has (H-l+1) x (W-l+1)
/// entries, out(i,j) = sum of the l x l patch with top-left (i,j).
/// scatter_sums is its adjoint (full-mode convolution back to H x W):
/// out(p) = sum of in(c) over every patch c that contains p.
///
/// The transform size per axis is the smallest 2^a 3^b 5^c 7^d >= the image
/// extent; the corner map is zero outside its valid region so circular
/// wraparound only ever reads zeros. Cost per call does not depend on l.
///
/// Instances are immutable and shared through a process-wide cache keyed by
/// (H, W, l). Lookups take a shared lock; planning takes an exclusive one.
class BlockFilter {
 public:
  static std::shared_ptr<const BlockFilter> get(int height, int width, int side);

  ~BlockFilter();
  BlockFilter(const BlockFilter&) = delete;
  BlockFilter& operator=(const BlockFilter&) = delete;

  [[nodiscard]] int height() const { return height_; }
  [[nodiscard]] int width() const { return width_; }
  [[nodiscard]] int side() const { return side_; }
  [[nodiscard]] int fft_rows() const { return fft_rows_; }
  [[nodiscard]] int fft_cols() const { return fft_cols_; }

  void clique_sums(std::span<const double> image, std::span<double> corner_map) const;
  void scatter_sums(std::span<const double> corner_map, std::span<double> image) const;

  /// Given per-pixel squared magnitudes, writes w(p) = sum_{c ni p} (s_c + eps^2)^(-1/2)
  /// where s_c is the clique sum of `squares`. Returns sum_c sqrt(s_c + eps^2).
  double smoothed_weights(std::span<const double> squares, double eps, std::span<double> weights) const;

  /// sum_c sqrt(s_c + eps^2) only.
  double smoothed_sum(std::span<const double> squares, double eps) const;

  BlockFilter(int height, int width, int side);

 private:
  struct Impl;
  void correlate(std::span<const double> in, int in_rows, int in_cols, bool conjugate,
                 std::span<double> out, int out_rows, int out_cols) const;

  int height_;
  int width_;
  int side_;
  int fft_rows_;
  int fft_cols_;
  std::unique_ptr<Impl> impl_;
};

/// Smallest n >= target with no prime factor above 7.
int next_fast_fft_size(int target);

}  // namespace blocksparse
