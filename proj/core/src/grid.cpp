#include "blocksparse/grid.hpp"

#include "blocksparse/errors.hpp"

#include <string>
#include <utility>

namespace blocksparse {

GridShape::GridShape(int h, int w) : height(h), width(w) {
  if (h < 1 || w < 1) {
    throw ConfigError("grid shape must be at least 1x1, got " + std::to_string(h) + "x" +
                      std::to_string(w));
  }
}

ImageGrid::ImageGrid(GridShape shape)
    : shape_(shape), values_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(shape.size()))) {}

ImageGrid::ImageGrid(GridShape shape, Eigen::VectorXd values)
    : shape_(shape), values_(std::move(values)) {
  if (static_cast<std::size_t>(values_.size()) != shape_.size()) {
    throw ShapeError("image has " + std::to_string(values_.size()) + " values, grid needs " +
                     std::to_string(shape_.size()));
  }
}

FrameStack::FrameStack(GridShape frame_shape, int frames)
    : frame_shape_(frame_shape),
      values_(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(frame_shape.size()), frames)) {
  if (frames < 1) throw ConfigError("frame stack needs at least one frame");
}

FrameStack::FrameStack(GridShape frame_shape, Eigen::MatrixXd values)
    : frame_shape_(frame_shape), values_(std::move(values)) {
  if (static_cast<std::size_t>(values_.rows()) != frame_shape_.size()) {
    throw ShapeError("frame stack has " + std::to_string(values_.rows()) +
                     " rows, frame grid needs " + std::to_string(frame_shape_.size()));
  }
  if (values_.cols() < 1) throw ConfigError("frame stack needs at least one frame");
}

ImageGrid FrameStack::frame(int t) const {
  if (t < 0 || t >= frames()) throw IndexError("frame index " + std::to_string(t) + " out of range");
  return ImageGrid(frame_shape_, values_.col(t));
}

void FrameStack::set_frame(int t, const ImageGrid& img) {
  if (t < 0 || t >= frames()) throw IndexError("frame index " + std::to_string(t) + " out of range");
  if (img.shape() != frame_shape_) throw ShapeError("frame shape mismatch");
  values_.col(t) = img.values();
}

}  // namespace blocksparse
