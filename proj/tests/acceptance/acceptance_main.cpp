// Prints one PASS/FAIL line per acceptance criterion; exits 1 if any fails.

#include "blocksparse/clique_system.hpp"
#include "blocksparse/fbs_rpca.hpp"
#include "blocksparse/harness/csv.hpp"
#include "blocksparse/harness/experiments.hpp"
#include "blocksparse/harness/synthetic.hpp"
#include "blocksparse/prox_admm.hpp"
#include "blocksparse/regularizer.hpp"
#include "support/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <random>
#include <string>
#include <vector>

using namespace blocksparse;
using namespace blocksparse::harness;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const Outcome& o, double seconds) {
  std::printf("criterion %d: %s  %s  [%.1fs]\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str(), seconds);
  std::fflush(stdout);
  failures += !o.pass;
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

fs::path work_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "blocksparse_acceptance" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// Parsed results.csv: header names to column index, plus rows.
struct Table {
  std::map<std::string, std::size_t> col;
  std::vector<std::vector<std::string>> rows;

  [[nodiscard]] double num(const std::vector<std::string>& r, const std::string& name) const {
    return std::stod(r.at(col.at(name)));
  }
  [[nodiscard]] const std::string& str(const std::vector<std::string>& r, const std::string& name) const {
    return r.at(col.at(name));
  }
};

Table load(const fs::path& path) {
  std::ifstream in(path);
  Table t;
  std::string line;
  auto split = [](const std::string& s) {
    std::vector<std::string> out(1);
    for (char ch : s) {
      if (ch == ',') {
        out.emplace_back();
      } else {
        out.back() += ch;
      }
    }
    return out;
  };
  std::getline(in, line);
  const auto head = split(line);
  for (std::size_t i = 0; i < head.size(); ++i) t.col[head[i]] = i;
  while (std::getline(in, line)) {
    if (!line.empty()) t.rows.push_back(split(line));
  }
  return t;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Outcome gradient_correctness() {
  std::mt19937_64 rng(101);
  double worst_paths = 0.0;
  double worst_fd = 0.0;
  const std::vector<GridShape> shapes{{8, 8}, {13, 17}, {32, 32}};
  for (const GridShape& s : shapes) {
    for (int side : {1, 2, 3, 4, 8}) {
      if (side > std::min(s.height, s.width)) continue;
      const CliqueSystem cs(s, side);
      const ImageGrid x(s, oracle::random_vector(static_cast<Eigen::Index>(s.size()), rng));
      const SmoothingParam sp(0.1);
      const Eigen::VectorXd naive = grad_J_eps_naive(x, cs, sp).values();
      const Eigen::VectorXd fft = grad_J_eps_fft(x, cs, sp).values();
      const auto f = [&](const Eigen::VectorXd& v) { return eval_J_eps(ImageGrid(s, v), cs, sp); };
      const Eigen::VectorXd fd = oracle::central_diff(f, x.values(), 1e-6 * x.values().cwiseAbs().maxCoeff());
      worst_paths = std::max(worst_paths, oracle::rel(fft, naive));
      worst_fd = std::max({worst_fd, oracle::rel(naive, fd), oracle::rel(fft, fd)});
    }
  }
  return {worst_paths < 1e-10 && worst_fd < 1e-5,
          "naive vs fft max rel " + fmt("%.2e", worst_paths) + " (< 1e-10), vs central differences " +
              fmt("%.2e", worst_fd) + " (< 1e-5)"};
}

Outcome prox_oracle() {
  std::mt19937_64 rng(202);
  const auto ps6 = oracle::patches(6, 6, 2);
  const CliqueSystem cs6({6, 6}, 2);
  double worst_obj = 0.0;
  int instances = 0;
  for (double lambda : {0.1, 1.0, 10.0}) {
    for (int t = 0; t < 17; ++t, ++instances) {
      const ImageGrid v({6, 6}, oracle::random_vector(36, rng));
      ProxConfig pc;
      pc.lambda = lambda;
      const double f_admm = oracle::prox_objective(prox_J(v, cs6, pc).x.values(), v.values(), ps6, lambda);
      const double f_ref =
          oracle::prox_objective(oracle::smoothed_prox(v.values(), ps6, lambda, 1e-9, 8000), v.values(), ps6, lambda);
      worst_obj = std::max(worst_obj, std::abs(f_admm - f_ref) / f_ref);
    }
  }

  // Certificate: the smooth-part gradient at x must be cancelled by unit-ball
  // subgradients of the cliques that are exactly zero.
  const auto ps4 = oracle::patches(4, 4, 2);
  const CliqueSystem cs4({4, 4}, 2);
  double worst_cert = 0.0;
  int certs = 0;
  for (double lambda : {0.1, 1.0, 10.0}) {
    for (int t = 0; t < 10; ++t, ++certs) {
      const Eigen::VectorXd v = oracle::random_vector(16, rng);
      ProxConfig pc;
      pc.lambda = lambda;
      pc.tol_abs = 1e-13;
      pc.tol_rel = 1e-11;
      pc.max_iters = 200000;
      const Eigen::VectorXd x = prox_J(ImageGrid({4, 4}, v), cs4, pc).x.values();
      Eigen::VectorXd g = 2.0 * (x - v);
      std::vector<const std::vector<int>*> zero;
      for (const auto& p : ps4) {
        const double n = std::sqrt(oracle::patch_sq(x, p));
        if (n == 0.0) {
          zero.push_back(&p);
        } else {
          for (int i : p) g[i] += lambda * x[i] / n;
        }
      }
      std::vector<Eigen::Vector4d> u(zero.size(), Eigen::Vector4d::Zero());
      auto residual = [&] {
        Eigen::VectorXd r = g;
        for (std::size_t k = 0; k < zero.size(); ++k) {
          for (int j = 0; j < 4; ++j) r[(*zero[k])[static_cast<std::size_t>(j)]] += lambda * u[k][j];
        }
        return r;
      };
      for (int it = 0; it < 20000 && !zero.empty(); ++it) {
        const Eigen::VectorXd r = residual();
        for (std::size_t k = 0; k < zero.size(); ++k) {
          for (int j = 0; j < 4; ++j) u[k][j] -= r[(*zero[k])[static_cast<std::size_t>(j)]] / (4.0 * lambda);
          if (u[k].norm() > 1.0) u[k].normalize();
        }
      }
      worst_cert = std::max(worst_cert, residual().norm());
    }
  }
  return {instances >= 50 && worst_obj < 1e-4 && worst_cert < 1e-4,
          std::to_string(instances) + " instances, max objective gap " + fmt("%.2e", worst_obj) +
              " (< 1e-4); certificate residual " + fmt("%.2e", worst_cert) + " over " + std::to_string(certs) +
              " 4x4 instances (< 1e-4)"};
}

Outcome colamp_recovery() {
  ExperimentConfig noiseless;
  noiseless.experiment = "cs-recovery-sweep";
  noiseless.trials = 20;
  noiseless.m_over_k = {3.0};
  noiseless.write_images = false;
  noiseless.out_dir = work_dir("c3_noiseless");
  const Table a = load(run_experiment(noiseless).results_csv);
  int successes = 0;
  for (const auto& r : a.rows) successes += a.num(r, "relative_error") < 1e-3;

  ExperimentConfig noisy;
  noisy.experiment = "robust-cs-snr-sweep";
  noisy.trials = 20;
  noisy.m_over_k = {2.0};
  noisy.snr_db = {10.0};
  noisy.write_images = false;
  noisy.out_dir = work_dir("c3_noisy");
  const Table b = load(run_experiment(noisy).results_csv);
  std::vector<double> block;
  std::vector<double> plain;
  for (const auto& r : b.rows) {
    (b.str(r, "method") == "colamp" ? block : plain).push_back(b.num(r, "relative_error"));
  }
  const double mb = median(block);
  const double mp = median(plain);
  return {successes >= 18 && mb < mp,
          "M=3K noiseless: " + std::to_string(successes) + "/20 below 1e-3 (need 18); M=2K at 10 dB: median error " +
              fmt("%.3g", mb) + " vs l1 baseline " + fmt("%.3g", mp)};
}

Outcome rpca_decomposition() {
  ExperimentConfig cfg;
  cfg.experiment = "rpca-decompose";
  cfg.write_images = false;
  cfg.out_dir = work_dir("c4");
  const Table t = load(run_experiment(cfg).results_csv);
  bool ok = !t.rows.empty();
  double min_f = 1.0;
  std::string ranks;
  for (const auto& r : t.rows) {
    const double f = t.num(r, "f_measure");
    const int rank = static_cast<int>(t.num(r, "rank"));
    min_f = std::min(min_f, f);
    ranks += (ranks.empty() ? "" : ",") + std::to_string(rank);
    ok = ok && f >= 0.9 && rank == 2 && t.num(r, "objective_nonincreasing") == 1.0 && t.str(r, "failed") == "0";
  }
  return {ok, std::to_string(t.rows.size()) + " trials, min F-measure " + fmt("%.4f", min_f) + ", ranks " + ranks +
                  ", objective nonincreasing"};
}

Outcome memory_claim() {
  ExperimentConfig cfg;
  cfg.experiment = "memory-benchmark";
  cfg.out_dir = work_dir("c5");
  const Table t = load(run_experiment(cfg).results_csv);
  const std::size_t n = 32 * 32;
  const int frames = 10;
  bool ok = t.rows.size() == 2;
  double fbs = 0.0;
  double admm = 0.0;
  for (const auto& r : t.rows) {
    const double measured = t.num(r, "measured_entries");
    const double formula = t.num(r, "formula_entries");
    ok = ok && measured == formula;
    (t.str(r, "method") == "fbs" ? fbs : admm) = measured;
  }
  ok = ok && fbs == double(4 * n * frames) && admm == double(204 * n * frames) && admm / fbs == 51.0;
  return {ok, "FBS peak " + fmt("%.0f", fbs) + " = 4NL, ADMM " + fmt("%.0f", admm) + " = 204NL, ratio " +
                  fmt("%.4g", admm / fbs)};
}

double seconds_per_iteration(const FrameStack& y, int side) {
  RpcaConfig cfg;
  cfg.clique_side = side;
  cfg.step = StepPolicy::kFixed;
  cfg.max_iters = 15;
  cfg.tol_obj = 0.0;
  cfg.mu = 0.03;
  const RpcaConfig resolved = cfg.resolved(y);
  double best = 1e300;
  for (int rep = 0; rep < 5; ++rep) {
    const RpcaResult r = solve_rpca(y, resolved);
    best = std::min(best, r.report.wall_clock_seconds / r.report.iterations);
  }
  return best;
}

Outcome clique_independent_runtime() {
  SyntheticSpec spec;
  spec.kind = SyntheticKind::kLowRankPlusBlockSparse;
  spec.shape = {64, 64};
  spec.frames = 10;
  spec.k = 160;
  spec.blocks = 4;
  spec.rank = 2;
  spec.amplitude_min = 6.0;
  spec.amplitude_max = 12.0;
  spec.seed = 606;
  const FrameStack y(spec.shape, gen_synthetic(spec).observation);
  (void)seconds_per_iteration(y, 4);
  const double t4 = seconds_per_iteration(y, 4);
  const double t16 = seconds_per_iteration(y, 16);
  const double diff = std::abs(t16 - t4) / t4;
  return {diff < 0.25, "per-iteration " + fmt("%.3g", t4 * 1e3) + " ms at l=4, " + fmt("%.3g", t16 * 1e3) +
                           " ms at l=16, difference " + fmt("%.1f", diff * 100) + "% (< 25%)"};
}

Outcome blocktv_denoising() {
  ExperimentConfig cfg;
  cfg.experiment = "blocktv-denoise";
  cfg.trials = 20;
  cfg.snr_db = {20.0};
  cfg.write_images = false;
  cfg.out_dir = work_dir("c7");
  const Table t = load(run_experiment(cfg).results_csv);
  // Mean over trials for every (method, lambda index); tuned = best mean.
  std::map<std::string, std::map<int, std::pair<double, int>>> acc;
  double noisy = 0.0;
  int noisy_n = 0;
  for (const auto& r : t.rows) {
    auto& cell = acc[t.str(r, "method")][static_cast<int>(t.num(r, "lambda_index"))];
    cell.first += t.num(r, "psnr_denoised_db");
    ++cell.second;
    noisy += t.num(r, "psnr_noisy_db");
    ++noisy_n;
  }
  auto tuned = [&](const std::string& method) {
    double best = -1e300;
    for (const auto& [idx, cell] : acc[method]) best = std::max(best, cell.first / cell.second);
    return best;
  };
  const double input = noisy / std::max(noisy_n, 1);
  const double block = tuned("blocktv");
  const double plain = tuned("tv");
  return {block - input >= 3.0 && block - plain >= 0.2,
          "input " + fmt("%.2f", input) + " dB, block-TV " + fmt("%.2f", block) + " dB (gain " +
              fmt("%.2f", block - input) + ", need 3), l=1 TV " + fmt("%.2f", plain) + " dB (margin " +
              fmt("%.2f", block - plain) + ", need 0.2)"};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome determinism() {
  std::vector<ExperimentConfig> runs;
  for (const std::string& name : experiment_names()) {
    ExperimentConfig cfg;
    cfg.experiment = name;
    cfg.trials = 2;
    cfg.write_images = false;
    if (name == "cs-recovery-sweep") cfg.m_over_k = {2.0, 4.0};
    if (name == "robust-cs-snr-sweep") cfg.snr_db = {10.0, 30.0};
    runs.push_back(cfg);
  }
  std::string mismatched;
  for (ExperimentConfig cfg : runs) {
    cfg.jobs = 1;
    cfg.out_dir = work_dir("c8_" + cfg.experiment + "_a");
    const std::string a = slurp(run_experiment(cfg).results_csv);
    cfg.jobs = 2;
    cfg.out_dir = work_dir("c8_" + cfg.experiment + "_b");
    const std::string b = slurp(run_experiment(cfg).results_csv);
    if (a.empty() || a != b) mismatched += " " + cfg.experiment;
  }
  return {mismatched.empty(), mismatched.empty() ? "results.csv byte-identical across reruns for all 5 experiments"
                                                 : "mismatch in:" + mismatched};
}

}  // namespace

int main() {
  using Fn = Outcome (*)();
  const std::vector<Fn> criteria{gradient_correctness, prox_oracle,       colamp_recovery,   rpca_decomposition,
                                 memory_claim,         clique_independent_runtime, blocktv_denoising, determinism};
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const Stopwatch clock;
    Outcome o;
    try {
      o = criteria[i]();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    report(static_cast<int>(i + 1), o, clock.seconds());
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
