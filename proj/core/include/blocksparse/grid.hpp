#pragma once

#include <Eigen/Dense>

#include <cstddef>

namespace blocksparse {

/// Height x width of a pixel grid.
///
/// Pixels are vectorized row-major: pixel (r, c) lives at linear index
/// r * width + c. Every module (cliques, FFT filters, the gradient operator
/// and dense measurement matrices) uses this ordering.
struct GridShape {
  int height = 0;
  int width = 0;

  GridShape() = default;
  GridShape(int h, int w);

  [[nodiscard]] std::size_t size() const {
    return static_cast<std::size_t>(height) * static_cast<std::size_t>(width);
  }
  [[nodiscard]] std::size_t index(int row, int col) const {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(width) +
           static_cast<std::size_t>(col);
  }
  [[nodiscard]] int row_of(std::size_t idx) const { return static_cast<int>(idx / width); }
  [[nodiscard]] int col_of(std::size_t idx) const { return static_cast<int>(idx % width); }

  friend bool operator==(const GridShape&, const GridShape&) = default;
};

using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// A single real-valued image on a GridShape.
class ImageGrid {
 public:
  ImageGrid() = default;
  explicit ImageGrid(GridShape shape);
  ImageGrid(GridShape shape, Eigen::VectorXd values);

  static ImageGrid zeros(GridShape shape) { return ImageGrid(shape); }

  [[nodiscard]] const GridShape& shape() const { return shape_; }
  [[nodiscard]] std::size_t size() const { return shape_.size(); }

  [[nodiscard]] const Eigen::VectorXd& values() const { return values_; }
  Eigen::VectorXd& values() { return values_; }

  double& operator()(int row, int col) { return values_[static_cast<Eigen::Index>(shape_.index(row, col))]; }
  double operator()(int row, int col) const {
    return values_[static_cast<Eigen::Index>(shape_.index(row, col))];
  }

  // H x W view in row-major layout (no copy).
  [[nodiscard]] Eigen::Map<const RowMajorMatrix> as_matrix() const {
    return {values_.data(), shape_.height, shape_.width};
  }

  [[nodiscard]] bool all_finite() const { return values_.allFinite(); }

 private:
  GridShape shape_;
  Eigen::VectorXd values_;
};

/// N x L matrix of L vectorized frames sharing one GridShape.
class FrameStack {
 public:
  FrameStack() = default;
  FrameStack(GridShape frame_shape, int frames);
  FrameStack(GridShape frame_shape, Eigen::MatrixXd values);

  [[nodiscard]] const GridShape& frame_shape() const { return frame_shape_; }
  [[nodiscard]] int frames() const { return static_cast<int>(values_.cols()); }
  [[nodiscard]] std::size_t pixels() const { return frame_shape_.size(); }

  [[nodiscard]] const Eigen::MatrixXd& values() const { return values_; }
  Eigen::MatrixXd& values() { return values_; }

  [[nodiscard]] ImageGrid frame(int t) const;
  void set_frame(int t, const ImageGrid& img);

 private:
  GridShape frame_shape_;
  Eigen::MatrixXd values_;
};

}  // namespace blocksparse
