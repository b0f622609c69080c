#include "blocksparse/block_filter.hpp"

#include "blocksparse/errors.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <tuple>
#include <vector>

namespace blocksparse {

namespace {

// FFTW's planner is not reentrant; plan creation and destruction go through this.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};
using RealBuffer = std::unique_ptr<double[], FftwFree>;
using ComplexBuffer = std::unique_ptr<fftw_complex[], FftwFree>;

RealBuffer alloc_real(std::size_t n) {
  auto* p = static_cast<double*>(fftw_malloc(sizeof(double) * n));
  if (p == nullptr) throw NumericalError("fftw_malloc failed");
  return RealBuffer(p);
}

ComplexBuffer alloc_complex(std::size_t n) {
  auto* p = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
  if (p == nullptr) throw NumericalError("fftw_malloc failed");
  return ComplexBuffer(p);
}

}  // namespace

int next_fast_fft_size(int target) {
  if (target <= 1) return 1;
  for (int n = target;; ++n) {
    int m = n;
    for (const int p : {2, 3, 5, 7}) {
      while (m % p == 0) m /= p;
    }
    if (m == 1) return n;
  }
}

struct BlockFilter::Impl {
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;
  std::vector<std::complex<double>> kernel_spectrum;

  ~Impl() {
    std::lock_guard lock(planner_mutex());
    if (forward != nullptr) fftw_destroy_plan(forward);
    if (inverse != nullptr) fftw_destroy_plan(inverse);
  }
};

BlockFilter::BlockFilter(int height, int width, int side)
    : height_(height), width_(width), side_(side), impl_(std::make_unique<Impl>()) {
  if (height < 1 || width < 1 || side < 1 || side > std::min(height, width)) {
    throw ConfigError("block filter: invalid shape " + std::to_string(height) + "x" +
                      std::to_string(width) + " with side " + std::to_string(side));
  }
  fft_rows_ = next_fast_fft_size(height);
  fft_cols_ = next_fast_fft_size(width);
  const std::size_t n_real = static_cast<std::size_t>(fft_rows_) * fft_cols_;
  const std::size_t n_cplx = static_cast<std::size_t>(fft_rows_) * (fft_cols_ / 2 + 1);

  auto real = alloc_real(n_real);
  auto cplx = alloc_complex(n_cplx);
  {
    std::lock_guard lock(planner_mutex());
    impl_->forward = fftw_plan_dft_r2c_2d(fft_rows_, fft_cols_, real.get(), cplx.get(), FFTW_ESTIMATE);
    impl_->inverse = fftw_plan_dft_c2r_2d(fft_rows_, fft_cols_, cplx.get(), real.get(), FFTW_ESTIMATE);
  }
  if (impl_->forward == nullptr || impl_->inverse == nullptr) {
    throw NumericalError("FFTW planning failed for " + std::to_string(fft_rows_) + "x" +
                         std::to_string(fft_cols_));
  }

  std::fill(real.get(), real.get() + n_real, 0.0);
  for (int i = 0; i < side; ++i) {
    for (int j = 0; j < side; ++j) real[static_cast<std::size_t>(i) * fft_cols_ + j] = 1.0;
  }
  fftw_execute_dft_r2c(impl_->forward, real.get(), cplx.get());
  impl_->kernel_spectrum.resize(n_cplx);
  for (std::size_t k = 0; k < n_cplx; ++k) impl_->kernel_spectrum[k] = {cplx[k][0], cplx[k][1]};
}

BlockFilter::~BlockFilter() = default;

std::shared_ptr<const BlockFilter> BlockFilter::get(int height, int width, int side) {
  using Key = std::tuple<int, int, int>;
  static std::shared_mutex cache_mutex;
  static std::map<Key, std::shared_ptr<const BlockFilter>> cache;

  const Key key{height, width, side};
  {
    std::shared_lock lock(cache_mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  std::unique_lock lock(cache_mutex);
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  auto filter = std::make_shared<const BlockFilter>(height, width, side);
  cache.emplace(key, filter);
  return filter;
}

void BlockFilter::correlate(std::span<const double> in, int in_rows, int in_cols, bool conjugate,
                            std::span<double> out, int out_rows, int out_cols) const {
  const std::size_t n_real = static_cast<std::size_t>(fft_rows_) * fft_cols_;
  const std::size_t n_cplx = static_cast<std::size_t>(fft_rows_) * (fft_cols_ / 2 + 1);
  auto real = alloc_real(n_real);
  auto cplx = alloc_complex(n_cplx);

  std::fill(real.get(), real.get() + n_real, 0.0);
  for (int r = 0; r < in_rows; ++r) {
    std::copy_n(in.data() + static_cast<std::size_t>(r) * in_cols, in_cols,
                real.get() + static_cast<std::size_t>(r) * fft_cols_);
  }
  fftw_execute_dft_r2c(impl_->forward, real.get(), cplx.get());

  const double scale = 1.0 / static_cast<double>(n_real);
  for (std::size_t k = 0; k < n_cplx; ++k) {
    const std::complex<double> kern =
        conjugate ? std::conj(impl_->kernel_spectrum[k]) : impl_->kernel_spectrum[k];
    const std::complex<double> v = std::complex<double>(cplx[k][0], cplx[k][1]) * kern * scale;
    cplx[k][0] = v.real();
    cplx[k][1] = v.imag();
  }
  fftw_execute_dft_c2r(impl_->inverse, cplx.get(), real.get());

  for (int r = 0; r < out_rows; ++r) {
    std::copy_n(real.get() + static_cast<std::size_t>(r) * fft_cols_, out_cols,
                out.data() + static_cast<std::size_t>(r) * out_cols);
  }
}

void BlockFilter::clique_sums(std::span<const double> image, std::span<double> corner_map) const {
  const int cr = height_ - side_ + 1;
  const int cc = width_ - side_ + 1;
  if (image.size() != static_cast<std::size_t>(height_) * width_ ||
      corner_map.size() != static_cast<std::size_t>(cr) * cc) {
    throw ShapeError("block filter: clique_sums buffer size mismatch");
  }
  correlate(image, height_, width_, /*conjugate=*/true, corner_map, cr, cc);
}

void BlockFilter::scatter_sums(std::span<const double> corner_map, std::span<double> image) const {
  const int cr = height_ - side_ + 1;
  const int cc = width_ - side_ + 1;
  if (image.size() != static_cast<std::size_t>(height_) * width_ ||
      corner_map.size() != static_cast<std::size_t>(cr) * cc) {
    throw ShapeError("block filter: scatter_sums buffer size mismatch");
  }
  correlate(corner_map, cr, cc, /*conjugate=*/false, image, height_, width_);
}

double BlockFilter::smoothed_weights(std::span<const double> squares, double eps,
                                     std::span<double> weights) const {
  const std::size_t n_corners =
      static_cast<std::size_t>(height_ - side_ + 1) * static_cast<std::size_t>(width_ - side_ + 1);
  std::vector<double> map(n_corners);
  clique_sums(squares, map);
  const double eps2 = eps * eps;
  double total = 0.0;
  for (double& s : map) {
    // Round-off can push an all-zero patch slightly negative.
    const double norm = std::sqrt(std::max(s, 0.0) + eps2);
    total += norm;
    s = 1.0 / norm;
  }
  scatter_sums(map, weights);
  return total;
}

double BlockFilter::smoothed_sum(std::span<const double> squares, double eps) const {
  const std::size_t n_corners =
      static_cast<std::size_t>(height_ - side_ + 1) * static_cast<std::size_t>(width_ - side_ + 1);
  std::vector<double> map(n_corners);
  clique_sums(squares, map);
  const double eps2 = eps * eps;
  double total = 0.0;
  for (const double s : map) total += std::sqrt(std::max(s, 0.0) + eps2);
  return total;
}

}  // namespace blocksparse
