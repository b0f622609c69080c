#include "blocksparse/errors.hpp"
#include "blocksparse/harness/experiments.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

}  // namespace

int main(int argc, char** argv) {
  using blocksparse::harness::ExperimentConfig;
  using blocksparse::harness::SolverChoice;

  CLI::App app{"Structured-sparsity experiments on synthetic data"};
  app.set_version_flag("--version", "blocksparse 0.1.0");

  ExperimentConfig cfg;
  std::string out_dir = "out";
  std::string solver = "fbs";
  bool dump_config = false;
  bool no_images = false;

  std::string names;
  for (const auto& n : blocksparse::harness::experiment_names()) names += (names.empty() ? "" : ", ") + n;

  app.add_option("experiment", cfg.experiment, "One of: " + names)->required();
  app.add_option("--seed", cfg.seed, "Master seed")->capture_default_str();
  app.add_option("--trials", cfg.trials, "Number of trials (default depends on the experiment)");
  app.add_option("--jobs", cfg.jobs, "Trials run concurrently")->capture_default_str();
  app.add_option("--out-dir", out_dir, "Output directory")->capture_default_str();
  app.add_option("--clique-side", cfg.clique_side, "Clique side l");
  app.add_option("--lambda", cfg.lambda, "Regularization weight (CoLaMP: initial weight)");
  app.add_option("--lambda-growth", cfg.lambda_growth, "CoLaMP per-iteration weight multiplier");
  app.add_option("--mu", cfg.mu, "RPCA data-fit weight");
  app.add_option("--alpha", cfg.alpha, "Step size (0: solver default)");
  app.add_option("--epsilon", cfg.epsilon, "Smoothing parameter (0: relative default)");
  app.add_option("--k-sparsity", cfg.k_sparsity, "Support size K");
  app.add_option("--m-over-k", cfg.m_over_k, "Measurement ratios M/K (comma separated)")->delimiter(',');
  app.add_option("--snr-db", cfg.snr_db, "Measurement SNR or input PSNR in dB (comma separated)")->delimiter(',');
  app.add_option("--solver", solver, "RPCA solver")->check(CLI::IsMember({"admm", "fbs"}))->capture_default_str();
  app.add_option("--max-iters", cfg.max_iters, "Solver iteration limit");
  app.add_option("--amplitude", cfg.amplitude, "Lower end of planted block magnitudes");
  app.add_flag("--no-images", no_images, "Skip PGM and matrix outputs");
  app.add_flag("--dump-config", dump_config, "Print the resolved configuration as JSON and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  cfg.out_dir = out_dir;
  cfg.solver = solver == "admm" ? SolverChoice::kAdmm : SolverChoice::kFbs;
  cfg.write_images = !no_images;

  try {
    const ExperimentConfig resolved = cfg.resolved();
    if (dump_config) {
      std::cout << resolved.to_json() << '\n';
      return 0;
    }
    const auto summary = blocksparse::harness::run_experiment(resolved);
    std::cout << resolved.experiment << ": " << summary.rows << " rows (" << summary.failed_rows << " failed) -> "
              << summary.results_csv.string() << '\n';
    return 0;
  } catch (const blocksparse::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const blocksparse::IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
