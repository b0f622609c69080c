#include "blocksparse/solver_common.hpp"

#include <algorithm>

namespace blocksparse {

std::string_view to_string(TerminationReason reason) {
  switch (reason) {
    case TerminationReason::kConverged:
      return "converged";
    case TerminationReason::kMaxIterations:
      return "max-iterations";
    case TerminationReason::kDiverged:
      return "diverged";
    case TerminationReason::kSupportCollapse:
      return "support-collapse";
  }
  return "unknown";
}

void AllocationTracker::account(const std::string& tag, std::size_t entries) {
  std::lock_guard lock(mutex_);
  current_ += entries;
  by_tag_[tag] += entries;
  peak_ = std::max(peak_, current_);
}

void AllocationTracker::release(const std::string& tag, std::size_t entries) {
  std::lock_guard lock(mutex_);
  current_ -= std::min(current_, entries);
  auto it = by_tag_.find(tag);
  if (it != by_tag_.end()) {
    it->second -= std::min(it->second, entries);
    if (it->second == 0) by_tag_.erase(it);
  }
}

std::size_t AllocationTracker::current() const {
  std::lock_guard lock(mutex_);
  return current_;
}

std::size_t AllocationTracker::peak() const {
  std::lock_guard lock(mutex_);
  return peak_;
}

std::map<std::string, std::size_t> AllocationTracker::live_by_tag() const {
  std::lock_guard lock(mutex_);
  return by_tag_;
}

void AllocationTracker::reset() {
  std::lock_guard lock(mutex_);
  current_ = 0;
  peak_ = 0;
  by_tag_.clear();
}

TrackedMatrix::TrackedMatrix(AllocationTracker* tracker, std::string tag, Eigen::Index rows,
                             Eigen::Index cols)
    : tracker_(tracker),
      tag_(std::move(tag)),
      entries_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols)),
      data_(Eigen::MatrixXd::Zero(rows, cols)) {
  if (tracker_ != nullptr) tracker_->account(tag_, entries_);
}

TrackedMatrix::~TrackedMatrix() {
  if (tracker_ != nullptr) tracker_->release(tag_, entries_);
}

std::size_t admm_rpca_storage_entries(int side, std::size_t pixels, int frames) {
  const std::size_t l2 = static_cast<std::size_t>(side) * static_cast<std::size_t>(side);
  return (2 * l2 + 4) * pixels * static_cast<std::size_t>(frames);
}

std::size_t fbs_rpca_storage_entries(std::size_t pixels, int frames) {
  return 4 * pixels * static_cast<std::size_t>(frames);
}

}  // namespace blocksparse
