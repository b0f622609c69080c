#include "blocksparse/clique_system.hpp"

#include "blocksparse/errors.hpp"

#include <algorithm>
#include <string>

namespace blocksparse {

CliqueSystem::CliqueSystem(GridShape shape, int side) : shape_(shape), side_(side) {
  if (side < 1) throw ConfigError("clique side must be >= 1");
  if (side > std::min(shape.height, shape.width)) {
    throw ConfigError("clique side " + std::to_string(side) + " exceeds grid " +
                      std::to_string(shape.height) + "x" + std::to_string(shape.width));
  }
  const int rows = corner_rows();
  const int cols = corner_cols();
  const std::size_t n_cliques = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
  corners_.reserve(n_cliques);
  pixels_.reserve(n_cliques * clique_size());
  subsets_.assign(clique_size(), {});

  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const std::size_t id = corners_.size();
      corners_.push_back({r, c});
      for (int i = 0; i < side; ++i) {
        for (int j = 0; j < side; ++j) pixels_.push_back(shape_.index(r + i, c + j));
      }
      subsets_[static_cast<std::size_t>((r % side) * side + (c % side))].push_back(id);
    }
  }
}

void CliqueSystem::check_clique(std::size_t c) const {
  if (c >= corners_.size()) {
    throw IndexError("clique " + std::to_string(c) + " out of range (" +
                     std::to_string(corners_.size()) + " cliques)");
  }
}

CliqueSystem::Corner CliqueSystem::corner(std::size_t c) const {
  check_clique(c);
  return corners_[c];
}

std::span<const std::size_t> CliqueSystem::indices(std::size_t c) const {
  check_clique(c);
  return {pixels_.data() + c * clique_size(), clique_size()};
}

std::span<const std::size_t> CliqueSystem::subset(std::size_t i) const {
  if (i >= subsets_.size()) throw IndexError("subset " + std::to_string(i) + " out of range");
  return subsets_[i];
}

std::size_t CliqueSystem::subset_of(std::size_t c) const {
  const Corner k = corner(c);
  return static_cast<std::size_t>((k.row % side_) * side_ + (k.col % side_));
}

Eigen::VectorXd CliqueSystem::gather(const ImageGrid& x, std::size_t c) const {
  if (x.shape() != shape_) throw ShapeError("gather: image shape does not match clique system");
  const auto idx = indices(c);
  Eigen::VectorXd out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) {
    out[static_cast<Eigen::Index>(k)] = x.values()[static_cast<Eigen::Index>(idx[k])];
  }
  return out;
}

void CliqueSystem::scatter_add(ImageGrid& acc, std::size_t c, std::span<const double> g) const {
  if (acc.shape() != shape_) throw ShapeError("scatter_add: image shape does not match clique system");
  const auto idx = indices(c);
  if (g.size() != idx.size()) {
    throw ShapeError("scatter_add: got " + std::to_string(g.size()) + " values for a clique of " +
                     std::to_string(idx.size()));
  }
  for (std::size_t k = 0; k < idx.size(); ++k) {
    acc.values()[static_cast<Eigen::Index>(idx[k])] += g[k];
  }
}

double CliqueSystem::squared_norm(std::span<const double> x, std::size_t c) const {
  double s = 0.0;
  for (const std::size_t p : indices(c)) s += x[p] * x[p];
  return s;
}

}  // namespace blocksparse
