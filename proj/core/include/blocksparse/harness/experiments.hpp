#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace blocksparse::harness {

enum class SolverChoice { kAdmm, kFbs };

std::string_view to_string(SolverChoice s);

/// Names accepted by run_experiment, in CLI order.
const std::vector<std::string>& experiment_names();

/// Settings for one experiment run. Zero or empty fields (and a negative
/// lambda) mean "use the experiment's default"; resolved() substitutes them.
struct ExperimentConfig {
  std::string experiment;
  std::uint64_t seed = 1;
  int trials = 0;
  int jobs = 1;
  std::filesystem::path out_dir = "out";
  int clique_side = 0;
  double lambda = -1.0;   // colamp: lambda0; rpca: lambda; blocktv: fixed lambda (skips tuning)
  double lambda_growth = 0.0;
  double mu = 0.0;
  double alpha = 0.0;
  double epsilon = 0.0;
  int k_sparsity = 0;
  std::vector<double> m_over_k;
  std::vector<double> snr_db;  // measurement SNR (CS) or input PSNR (denoising)
  SolverChoice solver = SolverChoice::kFbs;
  int max_iters = 0;
  double amplitude = 0.0;      // lower end of blob magnitudes; the upper end is twice this
  bool write_images = true;

  /// Throws ConfigError for an unknown experiment or invalid values.
  [[nodiscard]] ExperimentConfig resolved() const;
  void validate() const;
  /// Fully resolved settings as pretty-printed JSON.
  [[nodiscard]] std::string to_json() const;
};

struct ExperimentSummary {
  std::size_t rows = 0;
  std::size_t failed_rows = 0;
  std::filesystem::path results_csv;
  std::filesystem::path timing_csv;
};

/// Runs trials concurrently (up to cfg.jobs), then writes results.csv in
/// (trial, parameter point, method) order, timing.csv with wall-clock
/// seconds, config.json and images under out_dir. results.csv depends only on
/// the resolved config. Solver failures become rows with failed = 1.
/// Throws IoError when out_dir cannot be written.
ExperimentSummary run_experiment(const ExperimentConfig& cfg);

}  // namespace blocksparse::harness
