#pragma once

#include "blocksparse/grid.hpp"

#include <Eigen/Dense>

#include <filesystem>

namespace blocksparse::harness {

enum class PgmDepth { k8 = 8, k16 = 16 };

/// Binary PGM (P5). Values are mapped linearly from [lo, hi] to [0, maxval]
/// and clamped; 16-bit samples are big-endian as Netpbm requires.
void write_pgm(const std::filesystem::path& path, const ImageGrid& img, PgmDepth depth, double lo, double hi);

struct PgmImage {
  ImageGrid levels;  // raw sample values, 0..maxval
  int maxval = 0;
};

PgmImage read_pgm(const std::filesystem::path& path);

/// Float64 matrix container: 8-byte magic "BSPMAT01", uint64 rows, uint64 cols
/// (little-endian), then rows * cols little-endian doubles in row-major order.
void write_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix(const std::filesystem::path& path);

}  // namespace blocksparse::harness
