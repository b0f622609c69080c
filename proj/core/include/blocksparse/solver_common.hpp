#pragma once

#include "blocksparse/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <exception>
#include <map>
#include <mutex>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

namespace blocksparse {

enum class TerminationReason { kConverged, kMaxIterations, kDiverged, kSupportCollapse };

std::string_view to_string(TerminationReason reason);

struct SolverReport {
  int iterations = 0;
  std::vector<double> objective_trace;
  std::vector<double> residual_trace;
  TerminationReason termination = TerminationReason::kMaxIterations;
  // Declared working buffers only (entries, not bytes); inputs and outputs excluded.
  std::size_t peak_aux_entries = 0;
  double wall_clock_seconds = 0.0;
  std::string note;
};

/// Counts live solver working-buffer entries and their high-water mark.
///
/// Entries, not bytes. Registration is thread-safe. One tracker per solver run;
/// reset() starts a new run.
class AllocationTracker {
 public:
  void account(const std::string& tag, std::size_t entries);
  void release(const std::string& tag, std::size_t entries);

  [[nodiscard]] std::size_t current() const;
  [[nodiscard]] std::size_t peak() const;
  [[nodiscard]] std::map<std::string, std::size_t> live_by_tag() const;
  void reset();

 private:
  mutable std::mutex mutex_;
  std::size_t current_ = 0;
  std::size_t peak_ = 0;
  std::map<std::string, std::size_t> by_tag_;
};

/// A dense working buffer whose entry count is registered with a tracker for
/// as long as it lives.
class TrackedMatrix {
 public:
  TrackedMatrix(AllocationTracker* tracker, std::string tag, Eigen::Index rows, Eigen::Index cols);
  ~TrackedMatrix();
  TrackedMatrix(const TrackedMatrix&) = delete;
  TrackedMatrix& operator=(const TrackedMatrix&) = delete;

  Eigen::MatrixXd& operator*() { return data_; }
  const Eigen::MatrixXd& operator*() const { return data_; }
  Eigen::MatrixXd* operator->() { return &data_; }
  const Eigen::MatrixXd* operator->() const { return &data_; }

 private:
  AllocationTracker* tracker_;
  std::string tag_;
  std::size_t entries_;
  Eigen::MatrixXd data_;
};

inline constexpr double kArmijoC = 1e-4;
inline constexpr double kBacktrackBeta = 0.5;
inline constexpr int kMaxHalvings = 60;

/// Armijo backtracking along -g: returns the largest alpha = alpha0 * 0.5^k
/// (k <= 60) with f(x - alpha g) <= f(x) - 1e-4 alpha ||g||^2.
/// Returns alpha0 unchanged when g == 0. Throws StepFailure if no halving is
/// accepted, which signals an inconsistent gradient.
template <typename Objective>
double backtrack_step(Objective&& f, const Eigen::VectorXd& x, const Eigen::VectorXd& g, double alpha0,
                      double fx) {
  if (!(alpha0 > 0.0)) throw ConfigError("backtrack_step: alpha0 must be > 0");
  if (!std::isfinite(fx)) throw ConfigError("backtrack_step: f(x) is not finite");
  const double g2 = g.squaredNorm();
  if (g2 == 0.0) return alpha0;
  double alpha = alpha0;
  for (int k = 0; k <= kMaxHalvings; ++k) {
    const double trial = f(Eigen::VectorXd(x - alpha * g));
    if (std::isfinite(trial) && trial <= fx - kArmijoC * alpha * g2) return alpha;
    alpha *= kBacktrackBeta;
  }
  throw StepFailure("backtrack_step: no sufficient decrease after 60 halvings (wrong gradient?)");
}

template <typename Objective>
double backtrack_step(Objective&& f, const Eigen::VectorXd& x, const Eigen::VectorXd& g, double alpha0) {
  const double fx = f(x);
  return backtrack_step(std::forward<Objective>(f), x, g, alpha0, fx);
}

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  [[nodiscard]] double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

/// Runs fn(i) for i in [0, count) on up to `jobs` threads. Each index runs
/// exactly once; results must not depend on scheduling.
template <typename Fn>
void parallel_for(int count, int jobs, Fn&& fn) {
  const int n_threads = std::clamp(jobs, 1, std::max(count, 1));
  if (n_threads == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  {
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int k = 0; k < n_threads; ++k) {
      pool.emplace_back([&] {
        for (int i = next++; i < count; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
          }
        }
      });
    }
  }
  if (first_error) std::rethrow_exception(first_error);
}

/// Auxiliary entries of consensus-ADMM RPCA with l x l cliques: l^2 copies of X
/// plus l^2 duals (2 l^2 N L), plus X, Y, Z and the dual of Y = X + Z (4 N L).
std::size_t admm_rpca_storage_entries(int side, std::size_t pixels, int frames);

/// Forward-backward RPCA keeps four N x L buffers.
std::size_t fbs_rpca_storage_entries(std::size_t pixels, int frames);

}  // namespace blocksparse
