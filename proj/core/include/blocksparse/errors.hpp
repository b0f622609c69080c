#pragma once

#include <stdexcept>
#include <string>

namespace blocksparse {

// Invalid hyperparameters or an infeasible problem setup.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

// Dimension mismatch between operands.
class ShapeError : public std::invalid_argument {
 public:
  explicit ShapeError(const std::string& what) : std::invalid_argument(what) {}
};

class IndexError : public std::out_of_range {
 public:
  explicit IndexError(const std::string& what) : std::out_of_range(what) {}
};

// A numerical kernel (SVD, FFT) failed or produced non-finite output.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// Backtracking exhausted its halvings; almost always a wrong gradient.
class StepFailure : public std::runtime_error {
 public:
  explicit StepFailure(const std::string& what) : std::runtime_error(what) {}
};

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace blocksparse
