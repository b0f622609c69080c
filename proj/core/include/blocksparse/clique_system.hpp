#pragma once

#include "blocksparse/grid.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace blocksparse {

/// All fully-contained l x l patches of a grid, plus their partition into
/// l^2 subsets of pairwise-disjoint patches.
///
/// Cliques are ordered row-major by top-left corner, so clique k has corner
/// (k / (W-l+1), k % (W-l+1)). Pixels inside a clique are listed row-major
/// within the patch. Subset i = (top % l) * l + (left % l); patches in one
/// subset tile the grid with stride l and never share a pixel. Boundary pixels
/// belong to fewer cliques than interior ones (no wraparound, no padding).
///
/// Immutable after construction; safe to share across threads.
class CliqueSystem {
 public:
  /// Throws ConfigError when l < 1 or l > min(H, W).
  CliqueSystem(GridShape shape, int side);

  [[nodiscard]] const GridShape& shape() const { return shape_; }
  [[nodiscard]] int side() const { return side_; }
  [[nodiscard]] std::size_t clique_size() const { return static_cast<std::size_t>(side_) * side_; }
  [[nodiscard]] std::size_t clique_count() const { return corners_.size(); }
  [[nodiscard]] std::size_t subset_count() const { return subsets_.size(); }

  /// Rows/cols of the valid-corner map, (H-l+1) x (W-l+1).
  [[nodiscard]] int corner_rows() const { return shape_.height - side_ + 1; }
  [[nodiscard]] int corner_cols() const { return shape_.width - side_ + 1; }

  struct Corner {
    int row;
    int col;
  };
  [[nodiscard]] Corner corner(std::size_t c) const;

  /// Linear pixel indices of clique c (length l^2).
  [[nodiscard]] std::span<const std::size_t> indices(std::size_t c) const;

  /// Clique ids in subset i.
  [[nodiscard]] std::span<const std::size_t> subset(std::size_t i) const;

  [[nodiscard]] std::size_t subset_of(std::size_t c) const;

  /// x_c in the clique's internal order.
  [[nodiscard]] Eigen::VectorXd gather(const ImageGrid& x, std::size_t c) const;
  /// acc[c] += g. Adjoint of gather.
  void scatter_add(ImageGrid& acc, std::size_t c, std::span<const double> g) const;
  void scatter_add(ImageGrid& acc, std::size_t c, const Eigen::VectorXd& g) const {
    scatter_add(acc, c, std::span<const double>(g.data(), static_cast<std::size_t>(g.size())));
  }

  // Raw-buffer variants used by the solvers; buffers are length N.
  [[nodiscard]] double squared_norm(std::span<const double> x, std::size_t c) const;

 private:
  void check_clique(std::size_t c) const;

  GridShape shape_;
  int side_;
  std::vector<Corner> corners_;
  std::vector<std::size_t> pixels_;  // clique_count * l^2, clique-major
  std::vector<std::vector<std::size_t>> subsets_;
};

/// Free-function spelling of the constructor.
inline CliqueSystem build_clique_system(GridShape shape, int side) { return {shape, side}; }

}  // namespace blocksparse
