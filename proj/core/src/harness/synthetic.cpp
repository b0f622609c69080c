#include "blocksparse/harness/synthetic.hpp"

#include "blocksparse/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace blocksparse::harness {

Rng trial_rng(std::uint64_t master_seed, int trial, int stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(master_seed & 0xffffffffu),
                    static_cast<std::uint32_t>(master_seed >> 32), static_cast<std::uint32_t>(trial),
                    static_cast<std::uint32_t>(stream), 0x6b6c6f63u};
  return Rng(seq);
}

std::string_view to_string(SyntheticKind kind) {
  switch (kind) {
    case SyntheticKind::kBlockySparse:
      return "blocky-sparse-image";
    case SyntheticKind::kPhantom:
      return "shepp-logan-like-phantom";
    case SyntheticKind::kLowRankPlusBlockSparse:
      return "lowrank-plus-blocksparse-stack";
    case SyntheticKind::kPiecewiseConstant:
      return "piecewise-constant-image";
  }
  return "unknown";
}

void SyntheticSpec::validate() const {
  const auto n = static_cast<long long>(shape.size());
  if (shape.height < 1 || shape.width < 1) throw ConfigError("synthetic: empty grid");
  if (frames < 1) throw ConfigError("synthetic: frames must be >= 1");
  if (measurements < 0) throw ConfigError("synthetic: measurements must be >= 0");
  if (!(noise_sigma >= 0.0)) throw ConfigError("synthetic: noise sigma must be >= 0");
  if (std::isnan(snr_db)) throw ConfigError("synthetic: SNR is NaN");
  const bool sparse_kind = kind == SyntheticKind::kBlockySparse || kind == SyntheticKind::kLowRankPlusBlockSparse;
  if (sparse_kind) {
    if (k < 1 || k > n) {
      throw ConfigError("synthetic: K = " + std::to_string(k) + " must lie in [1, " + std::to_string(n) + "]");
    }
    if (blocks < 1 || blocks > k) throw ConfigError("synthetic: need 1 <= blocks <= K");
    if (block_rows < 0 || block_rows > shape.height) throw ConfigError("synthetic: bad block height");
    if (!(amplitude_min > 0.0) || amplitude_max < amplitude_min) {
      throw ConfigError("synthetic: need 0 < amplitude_min <= amplitude_max");
    }
  }
  if (kind == SyntheticKind::kLowRankPlusBlockSparse) {
    if (rank < 1 || rank > std::min<long long>(n, frames)) {
      throw ConfigError("synthetic: rank " + std::to_string(rank) + " exceeds min(N, L)");
    }
  } else if (frames != 1) {
    throw ConfigError("synthetic: only stacks have more than one frame");
  }
}

ImageGrid blocky_sparse_image(const SyntheticSpec& spec, Rng& rng) {
  const GridShape shape = spec.shape;
  ImageGrid img(shape);
  std::vector<char> blocked(shape.size(), 0);
  std::uniform_real_distribution<double> magnitude(spec.amplitude_min, spec.amplitude_max);
  std::bernoulli_distribution coin(0.5);

  for (int b = 0; b < spec.blocks; ++b) {
    const int kb = spec.k / spec.blocks + (b < spec.k % spec.blocks ? 1 : 0);
    int rows = spec.block_rows > 0 ? spec.block_rows
                                   : std::max(1, static_cast<int>(std::floor(std::sqrt(static_cast<double>(kb)))));
    rows = std::min(rows, kb);
    const int cols = (kb + rows - 1) / rows;
    if (rows > shape.height || cols > shape.width) {
      throw ConfigError("synthetic: a " + std::to_string(rows) + "x" + std::to_string(cols) +
                        " block does not fit the grid");
    }
    std::uniform_int_distribution<int> top_dist(0, shape.height - rows);
    std::uniform_int_distribution<int> left_dist(0, shape.width - cols);

    bool placed = false;
    for (int attempt = 0; attempt < 10000 && !placed; ++attempt) {
      const int top = top_dist(rng);
      const int left = left_dist(rng);
      bool free = true;
      for (int i = 0; i < kb && free; ++i) {
        free = blocked[shape.index(top + i / cols, left + i % cols)] == 0;
      }
      if (!free) continue;
      const double sign = coin(rng) ? 1.0 : -1.0;
      for (int i = 0; i < kb; ++i) {
        const int r = top + i / cols;
        const int c = left + i % cols;
        img(r, c) = sign * magnitude(rng);
        for (int dr = -1; dr <= 1; ++dr) {
          for (int dc = -1; dc <= 1; ++dc) {
            const int rr = r + dr;
            const int cc = c + dc;
            if (rr >= 0 && rr < shape.height && cc >= 0 && cc < shape.width) blocked[shape.index(rr, cc)] = 1;
          }
        }
      }
      placed = true;
    }
    if (!placed) throw ConfigError("synthetic: could not place " + std::to_string(spec.blocks) + " separated blocks");
  }
  return img;
}

ImageGrid ellipse_phantom(GridShape shape, Rng& rng) {
  std::uniform_real_distribution<double> centre(-0.6, 0.6);
  std::uniform_real_distribution<double> axis(0.08, 0.35);
  std::uniform_real_distribution<double> angle(0.0, std::numbers::pi);
  std::uniform_real_distribution<double> level(-0.3, 0.5);

  struct Ellipse {
    double cx, cy, a, b, theta, value;
  };
  std::vector<Ellipse> ellipses{{0.0, 0.0, 0.9, 0.7, 0.0, 0.5}};
  for (int e = 0; e < 8; ++e) {
    ellipses.push_back({centre(rng), centre(rng), axis(rng), axis(rng), angle(rng), level(rng)});
  }
  ImageGrid img(shape);
  for (int r = 0; r < shape.height; ++r) {
    for (int c = 0; c < shape.width; ++c) {
      const double y = 2.0 * (r + 0.5) / shape.height - 1.0;
      const double x = 2.0 * (c + 0.5) / shape.width - 1.0;
      double v = 0.0;
      for (const Ellipse& e : ellipses) {
        const double dx = x - e.cx;
        const double dy = y - e.cy;
        const double u = (dx * std::cos(e.theta) + dy * std::sin(e.theta)) / e.a;
        const double w = (-dx * std::sin(e.theta) + dy * std::cos(e.theta)) / e.b;
        if (u * u + w * w <= 1.0) v += e.value;
      }
      img(r, c) = std::clamp(v, 0.0, 1.0);
    }
  }
  return img;
}

ImageGrid piecewise_constant_image(GridShape shape, Rng& rng) {
  std::uniform_real_distribution<double> level(0.0, 1.0);
  const int min_side = std::max(2, std::min(shape.height, shape.width) / 8);
  const int max_side = std::max(min_side, std::min(shape.height, shape.width) / 2);
  std::uniform_int_distribution<int> side(min_side, max_side);

  ImageGrid img(shape);
  img.values().setConstant(level(rng));
  for (int k = 0; k < 10; ++k) {
    const int h = std::min(side(rng), shape.height);
    const int w = std::min(side(rng), shape.width);
    std::uniform_int_distribution<int> top(0, shape.height - h);
    std::uniform_int_distribution<int> left(0, shape.width - w);
    const int r0 = top(rng);
    const int c0 = left(rng);
    const double v = level(rng);
    for (int r = r0; r < r0 + h; ++r) {
      for (int c = c0; c < c0 + w; ++c) img(r, c) = v;
    }
  }
  const double lo = img.values().minCoeff();
  const double hi = img.values().maxCoeff();
  if (hi > lo) img.values() = (img.values().array() - lo) / (hi - lo);
  return img;
}

Eigen::MatrixXd gaussian_matrix(int m, int n, Rng& rng) {
  if (m < 1 || n < 1) throw ConfigError("gaussian_matrix: dimensions must be >= 1");
  std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(static_cast<double>(m)));
  Eigen::MatrixXd phi(m, n);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) phi(i, j) = normal(rng);
  }
  return phi;
}

double sigma_for_snr(const Eigen::MatrixXd& signal, double snr_db) {
  if (signal.size() == 0) throw ConfigError("sigma_for_snr: empty signal");
  const double power = signal.squaredNorm() / static_cast<double>(signal.size());
  return std::sqrt(power / std::pow(10.0, snr_db / 10.0));
}

namespace {

void add_noise(Eigen::MatrixXd& m, double sigma, Rng& rng) {
  if (sigma <= 0.0) return;
  std::normal_distribution<double> normal(0.0, sigma);
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) += normal(rng);
  }
}

}  // namespace

SyntheticData gen_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  Rng rng = trial_rng(spec.seed, spec.trial);
  SyntheticData out;
  const auto n = static_cast<Eigen::Index>(spec.shape.size());

  switch (spec.kind) {
    case SyntheticKind::kBlockySparse:
      out.truth = FrameStack(spec.shape, blocky_sparse_image(spec, rng).values());
      break;
    case SyntheticKind::kPhantom:
      out.truth = FrameStack(spec.shape, ellipse_phantom(spec.shape, rng).values());
      break;
    case SyntheticKind::kPiecewiseConstant:
      out.truth = FrameStack(spec.shape, piecewise_constant_image(spec.shape, rng).values());
      break;
    case SyntheticKind::kLowRankPlusBlockSparse: {
      std::normal_distribution<double> normal(0.0, 1.0);
      Eigen::MatrixXd u(n, spec.rank);
      Eigen::MatrixXd v(spec.frames, spec.rank);
      for (Eigen::Index j = 0; j < u.cols(); ++j) {
        for (Eigen::Index i = 0; i < u.rows(); ++i) u(i, j) = normal(rng);
      }
      for (Eigen::Index j = 0; j < v.cols(); ++j) {
        for (Eigen::Index i = 0; i < v.rows(); ++i) v(i, j) = normal(rng);
      }
      out.low_rank = FrameStack(spec.shape, Eigen::MatrixXd(u * v.transpose() / std::sqrt(spec.rank)));
      out.sparse = FrameStack(spec.shape, spec.frames);
      for (int t = 0; t < spec.frames; ++t) out.sparse.set_frame(t, blocky_sparse_image(spec, rng));
      out.truth = FrameStack(spec.shape, Eigen::MatrixXd(out.low_rank.values() + out.sparse.values()));
      break;
    }
  }

  const Eigen::MatrixXd& x0 = out.truth.values();
  if (spec.measurements > 0) {
    out.phi = gaussian_matrix(spec.measurements, static_cast<int>(n), rng);
    out.observation = out.phi * x0;
  } else {
    out.observation = x0;
  }
  out.noise_sigma = std::isfinite(spec.snr_db) ? sigma_for_snr(out.observation, spec.snr_db) : spec.noise_sigma;
  add_noise(out.observation, out.noise_sigma, rng);
  return out;
}

}  // namespace blocksparse::harness
