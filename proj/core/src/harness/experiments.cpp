#include "blocksparse/harness/experiments.hpp"

#include "blocksparse/blocktv.hpp"
#include "blocksparse/clique_system.hpp"
#include "blocksparse/colamp.hpp"
#include "blocksparse/errors.hpp"
#include "blocksparse/fbs_rpca.hpp"
#include "blocksparse/harness/csv.hpp"
#include "blocksparse/harness/image_io.hpp"
#include "blocksparse/harness/metrics.hpp"
#include "blocksparse/harness/synthetic.hpp"
#include "blocksparse/prox_admm.hpp"
#include "blocksparse/regularizer.hpp"
#include "blocksparse/solver_common.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <system_error>
#include <utility>
#include <vector>

namespace blocksparse::harness {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const std::string kCsSweep = "cs-recovery-sweep";
const std::string kRobustCs = "robust-cs-snr-sweep";
const std::string kDenoise = "blocktv-denoise";
const std::string kRpca = "rpca-decompose";
const std::string kMemory = "memory-benchmark";

// Multipliers of sigma / l^1.5 searched when no lambda is given for denoising.
const std::vector<double> kTvLambdaGrid = {0.3, 0.45, 0.6, 0.8, 1.0, 1.25, 1.6};

struct Emitted {
  CsvRow row;
  double seconds = 0.0;
};

CsvRow base_row(const ExperimentConfig& cfg, int trial, std::string method, std::vector<double> params) {
  CsvRow row;
  row.experiment = cfg.experiment;
  row.trial = trial;
  row.seed = cfg.seed;
  row.method = std::move(method);
  row.params = std::move(params);
  row.termination = "converged";
  return row;
}

// Runs fn(row) and times it; any exception turns the row into a failure record.
template <typename Fn>
Emitted guarded(CsvRow row, std::size_t n_metrics, Fn&& fn) {
  Emitted out{std::move(row), 0.0};
  Stopwatch clock;
  try {
    fn(out.row);
    if (out.row.metrics.size() != n_metrics) throw ConfigError("internal: metric count mismatch");
  } catch (const IoError&) {
    throw;
  } catch (const std::exception&) {
    out.row.metrics.assign(n_metrics, kNaN);
    out.row.termination = "error";
    out.row.failed = true;
  }
  out.seconds = clock.seconds();
  return out;
}

std::filesystem::path image_dir(const ExperimentConfig& cfg) { return cfg.out_dir / "images"; }

void save_image(const ExperimentConfig& cfg, const std::string& name, const ImageGrid& img, double lo, double hi,
                PgmDepth depth) {
  if (!cfg.write_images) return;
  write_pgm(image_dir(cfg) / (name + ".pgm"), img, depth, lo, hi);
  write_matrix(image_dir(cfg) / (name + ".bspm"), img.as_matrix());
}

std::string fmt_tag(double v) {
  std::string s = format_number(v);
  std::replace(s.begin(), s.end(), '.', 'p');
  std::replace(s.begin(), s.end(), '-', 'm');
  return s;
}

double symmetric_range(const ImageGrid& img) {
  const double m = img.size() > 0 ? img.values().cwiseAbs().maxCoeff() : 0.0;
  return m > 0.0 ? m : 1.0;
}

ExperimentSummary drive(const ExperimentConfig& cfg, const CsvSchema& schema,
                        const std::function<std::vector<Emitted>(int)>& trial_fn) {
  std::error_code ec;
  std::filesystem::create_directories(cfg.out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + cfg.out_dir.string() + ": " + ec.message());
  if (cfg.write_images) {
    std::filesystem::create_directories(image_dir(cfg), ec);
    if (ec) throw IoError("cannot create image directory: " + ec.message());
  }

  ExperimentSummary summary;
  summary.results_csv = cfg.out_dir / "results.csv";
  summary.timing_csv = cfg.out_dir / "timing.csv";
  CsvWriter results(summary.results_csv, schema);
  CsvWriter timing(summary.timing_csv, CsvSchema{schema.param_names, {"seconds"}});
  {
    std::ofstream json(cfg.out_dir / "config.json", std::ios::binary | std::ios::trunc);
    if (!json) throw IoError("cannot write config.json in " + cfg.out_dir.string());
    json << cfg.to_json() << '\n';
  }

  std::vector<std::vector<Emitted>> per_trial(static_cast<std::size_t>(cfg.trials));
  parallel_for(cfg.trials, cfg.jobs, [&](int t) { per_trial[static_cast<std::size_t>(t)] = trial_fn(t); });

  for (const auto& rows : per_trial) {
    for (const Emitted& e : rows) {
      results.write(e.row);
      CsvRow trow = e.row;
      trow.metrics = {e.seconds};
      timing.write(trow);
      ++summary.rows;
      if (e.row.failed) ++summary.failed_rows;
    }
  }
  return summary;
}

ColampConfig colamp_config(const ExperimentConfig& cfg, int k) {
  ColampConfig cc;
  cc.k = k;
  cc.lambda0 = cfg.lambda;
  cc.lambda_growth = cfg.lambda_growth;
  cc.max_iters = cfg.max_iters;
  return cc;
}

SyntheticSpec blocky_spec(const ExperimentConfig& cfg, int trial, int measurements, double snr) {
  SyntheticSpec spec;
  spec.kind = SyntheticKind::kBlockySparse;
  spec.shape = {32, 32};
  spec.k = cfg.k_sparsity;
  spec.blocks = 4;
  spec.amplitude_min = cfg.amplitude;
  spec.amplitude_max = 2.0 * cfg.amplitude;
  spec.measurements = measurements;
  spec.snr_db = snr;
  spec.seed = cfg.seed;
  spec.trial = trial;
  return spec;
}

int measurements_for(double m_over_k, int k) { return std::max(1, static_cast<int>(std::lround(m_over_k * k))); }

// ---------------------------------------------------------------------------

ExperimentSummary run_cs_sweep(const ExperimentConfig& cfg) {
  const CsvSchema schema{{"m_over_k", "measurements", "k", "clique_side", "lambda0", "lambda_growth"},
                         {"relative_error", "success", "precision", "recall", "f_measure", "iterations",
                          "residual_norm"}};
  const CliqueSystem cs(GridShape{32, 32}, cfg.clique_side);

  return drive(cfg, schema, [&](int trial) {
    std::vector<Emitted> rows;
    for (const double mk : cfg.m_over_k) {
      const int m = measurements_for(mk, cfg.k_sparsity);
      const std::vector<double> params{mk, double(m), double(cfg.k_sparsity), double(cfg.clique_side), cfg.lambda,
                                       cfg.lambda_growth};
      ColampResult res;
      SyntheticData data;
      rows.push_back(guarded(base_row(cfg, trial, "colamp", params), schema.metric_names.size(), [&](CsvRow& row) {
        data = gen_synthetic(blocky_spec(cfg, trial, m, std::numeric_limits<double>::infinity()));
        res = colamp_solve(data.observation.col(0), MeasurementModel(data.phi), cs,
                           colamp_config(cfg, cfg.k_sparsity));
        const Eigen::MatrixXd& x0 = data.truth.values();
        const double err = relative_error(res.x.values(), x0);
        const SupportScores sc = support_scores(res.x.values(), x0, 1e-6 * x0.cwiseAbs().maxCoeff());
        row.metrics = {err,          err < 1e-3 ? 1.0 : 0.0, sc.precision, sc.recall, sc.f_measure,
                       double(res.report.iterations),
                       res.report.residual_trace.empty() ? data.observation.norm() : res.report.residual_trace.back()};
        row.termination = std::string(to_string(res.report.termination));
      }));
      if (trial == 0 && !rows.back().row.failed) {
        const ImageGrid truth = data.truth.frame(0);
        const double range = symmetric_range(truth);
        save_image(cfg, "cs_truth", truth, -range, range, PgmDepth::k8);
        save_image(cfg, "cs_recovered_mk" + fmt_tag(mk), res.x, -range, range, PgmDepth::k8);
      }
    }
    return rows;
  });
}

ExperimentSummary run_robust_cs(const ExperimentConfig& cfg) {
  const CsvSchema schema{{"m_over_k", "measurements", "k", "snr_db", "clique_side", "lambda0", "lambda_growth"},
                         {"relative_error", "measured_snr_db", "precision", "recall", "f_measure", "iterations",
                          "residual_norm"}};
  const CliqueSystem cs_block(GridShape{32, 32}, cfg.clique_side);
  const CliqueSystem cs_l1(GridShape{32, 32}, 1);

  return drive(cfg, schema, [&](int trial) {
    std::vector<Emitted> rows;
    for (const double mk : cfg.m_over_k) {
      const int m = measurements_for(mk, cfg.k_sparsity);
      for (const double snr : cfg.snr_db) {
        SyntheticData data;
        bool have_data = false;
        for (const bool block : {true, false}) {
          const CliqueSystem& cs = block ? cs_block : cs_l1;
          const std::vector<double> params{mk, double(m), double(cfg.k_sparsity), snr, double(cs.side()),
                                           cfg.lambda, cfg.lambda_growth};
          rows.push_back(guarded(base_row(cfg, trial, block ? "colamp" : "colamp-l1", params),
                                 schema.metric_names.size(), [&](CsvRow& row) {
                                   if (!have_data) {
                                     data = gen_synthetic(blocky_spec(cfg, trial, m, snr));
                                     have_data = true;
                                   }
                                   const ColampResult res =
                                       colamp_solve(data.observation.col(0), MeasurementModel(data.phi), cs,
                                                    colamp_config(cfg, cfg.k_sparsity));
                                   const Eigen::MatrixXd& x0 = data.truth.values();
                                   const Eigen::MatrixXd clean = data.phi * x0;
                                   const SupportScores sc =
                                       support_scores(res.x.values(), x0, 1e-6 * x0.cwiseAbs().maxCoeff());
                                   row.metrics = {relative_error(res.x.values(), x0),
                                                  measured_snr_db(data.observation, clean),
                                                  sc.precision,
                                                  sc.recall,
                                                  sc.f_measure,
                                                  double(res.report.iterations),
                                                  res.report.residual_trace.empty()
                                                      ? data.observation.norm()
                                                      : res.report.residual_trace.back()};
                                   row.termination = std::string(to_string(res.report.termination));
                                   if (trial == 0 && cfg.write_images) {
                                     const ImageGrid truth = data.truth.frame(0);
                                     const double range = symmetric_range(truth);
                                     save_image(cfg, "robust_truth", truth, -range, range, PgmDepth::k8);
                                     save_image(cfg,
                                                std::string(block ? "robust_colamp" : "robust_colamp_l1") + "_snr" +
                                                    fmt_tag(snr) + "_mk" + fmt_tag(mk),
                                                res.x, -range, range, PgmDepth::k8);
                                   }
                                 }));
        }
      }
    }
    return rows;
  });
}

ExperimentSummary run_denoise(const ExperimentConfig& cfg) {
  const CsvSchema schema{{"input_psnr_db", "clique_side", "lambda", "lambda_index"},
                         {"psnr_noisy_db", "psnr_denoised_db", "psnr_gain_db", "iterations", "objective"}};
  const GridShape shape{64, 64};
  const std::vector<int> sides = cfg.clique_side == 1 ? std::vector<int>{1} : std::vector<int>{cfg.clique_side, 1};

  return drive(cfg, schema, [&](int trial) {
    std::vector<Emitted> rows;
    for (const double psnr : cfg.snr_db) {
      const double sigma = std::pow(10.0, -psnr / 20.0);
      SyntheticSpec spec;
      spec.kind = SyntheticKind::kPiecewiseConstant;
      spec.shape = shape;
      spec.noise_sigma = sigma;
      spec.seed = cfg.seed;
      spec.trial = trial;
      const SyntheticData data = gen_synthetic(spec);
      const ImageGrid clean = data.truth.frame(0);
      const ImageGrid noisy(shape, data.observation.col(0));
      const double psnr_noisy = psnr_db(noisy.values(), clean.values(), 1.0);
      if (trial == 0) {
        save_image(cfg, "denoise_clean_psnr" + fmt_tag(psnr), clean, 0.0, 1.0, PgmDepth::k16);
        save_image(cfg, "denoise_noisy_psnr" + fmt_tag(psnr), noisy, 0.0, 1.0, PgmDepth::k16);
      }
      for (const int side : sides) {
        std::vector<double> lambdas;
        if (cfg.lambda > 0.0) {
          lambdas = {cfg.lambda};
        } else {
          for (const double g : kTvLambdaGrid) lambdas.push_back(g * sigma / std::pow(double(side), 1.5));
        }
        for (std::size_t li = 0; li < lambdas.size(); ++li) {
          const std::vector<double> params{psnr, double(side), lambdas[li], double(li)};
          rows.push_back(guarded(base_row(cfg, trial, side == 1 ? "tv" : "blocktv", params),
                                 schema.metric_names.size(), [&](CsvRow& row) {
                                   BlockTvConfig bc;
                                   bc.lambda = lambdas[li];
                                   bc.clique_side = side;
                                   bc.epsilon = cfg.epsilon;
                                   bc.alpha = cfg.alpha;
                                   bc.max_iters = cfg.max_iters;
                                   const BlockTvResult res = denoise_blocktv(noisy, bc);
                                   const double out = psnr_db(res.x.values(), clean.values(), 1.0);
                                   row.metrics = {psnr_noisy, out, out - psnr_noisy, double(res.report.iterations),
                                                  res.report.objective_trace.empty()
                                                      ? blocktv_objective(res.x, noisy, bc)
                                                      : res.report.objective_trace.back()};
                                   row.termination = std::string(to_string(res.report.termination));
                                   if (trial == 0) {
                                     save_image(cfg,
                                                std::string(side == 1 ? "denoise_tv" : "denoise_blocktv") + "_psnr" +
                                                    fmt_tag(psnr) + "_lam" + std::to_string(li),
                                                res.x, 0.0, 1.0, PgmDepth::k16);
                                   }
                                 }));
        }
      }
    }
    return rows;
  });
}

// Proximal gradient on the unsmoothed objective with the exact clique prox
// computed per frame by consensus ADMM. Fixed step 1 / (2 mu).
RpcaResult rpca_prox_admm(const FrameStack& y, const RpcaConfig& cfg_in) {
  RpcaConfig cfg = cfg_in.resolved(y);
  cfg.validate();
  const CliqueSystem cs(y.frame_shape(), cfg.clique_side);
  const double step = 1.0 / (2.0 * cfg.mu);
  Stopwatch clock;

  RpcaResult out{FrameStack(y.frame_shape(), y.frames()), FrameStack(y.frame_shape(), y.frames()), {}, 0, cfg};
  Eigen::MatrixXd& x = out.sparse.values();
  Eigen::MatrixXd& z = out.low_rank.values();
  ProxConfig pc;
  pc.lambda = 2.0 * step * cfg.lambda;

  const auto objective = [&](double nuclear) {
    double j = 0.0;
    for (int t = 0; t < out.sparse.frames(); ++t) j += eval_J(out.sparse.frame(t), cs);
    return nuclear + cfg.lambda * j + 0.5 * cfg.mu * (y.values() - z - x).squaredNorm();
  };
  double f_prev = objective(0.0);
  out.report.termination = TerminationReason::kMaxIterations;
  for (int iter = 1; iter <= cfg.max_iters; ++iter) {
    const Eigen::MatrixXd r = y.values() - z - x;
    const FrameStack vx(y.frame_shape(), Eigen::MatrixXd(x + step * cfg.mu * r));
    double nuclear = 0.0;
    z = svt(z + step * cfg.mu * r, step, &out.rank, &nuclear);
    x = prox_J_framewise(vx, cs, pc, cfg.jobs).frames.values();
    const double f = objective(nuclear);
    out.report.iterations = iter;
    out.report.objective_trace.push_back(f);
    if (std::abs(f_prev - f) <= cfg.tol_obj * std::max(std::abs(f_prev), 1e-300)) {
      out.report.termination = TerminationReason::kConverged;
      break;
    }
    f_prev = f;
  }
  out.rank = numerical_rank(z);
  out.report.peak_aux_entries = admm_rpca_storage_entries(cfg.clique_side, y.pixels(), y.frames());
  out.report.wall_clock_seconds = clock.seconds();
  return out;
}

bool nonincreasing(const std::vector<double>& trace) {
  for (std::size_t i = 1; i < trace.size(); ++i) {
    if (trace[i] > trace[i - 1] * (1.0 + 1e-12) + 1e-12) return false;
  }
  return true;
}

RpcaConfig rpca_config(const ExperimentConfig& cfg) {
  RpcaConfig rc;
  rc.lambda = cfg.lambda > 0.0 ? cfg.lambda : 0.0;
  rc.mu = cfg.mu;
  rc.alpha = cfg.alpha;
  rc.epsilon = cfg.epsilon;
  rc.clique_side = cfg.clique_side;
  rc.max_iters = cfg.max_iters;
  return rc;
}

SyntheticSpec rpca_spec(const ExperimentConfig& cfg, int trial, GridShape shape, int frames) {
  SyntheticSpec spec;
  spec.kind = SyntheticKind::kLowRankPlusBlockSparse;
  spec.shape = shape;
  spec.frames = frames;
  spec.k = cfg.k_sparsity;
  spec.blocks = 4;
  spec.rank = 2;
  spec.amplitude_min = cfg.amplitude;
  spec.amplitude_max = 2.0 * cfg.amplitude;
  spec.seed = cfg.seed;
  spec.trial = trial;
  return spec;
}

ExperimentSummary run_rpca(const ExperimentConfig& cfg) {
  const CsvSchema schema{{"clique_side", "frames", "planted_rank", "lambda", "mu"},
                         {"f_measure", "precision", "recall", "rank", "sparse_rel_error", "lowrank_rel_error",
                          "objective", "objective_nonincreasing", "iterations", "peak_aux_entries"}};
  return drive(cfg, schema, [&](int trial) {
    const SyntheticSpec spec = rpca_spec(cfg, trial, {32, 32}, 10);
    const SyntheticData data = gen_synthetic(spec);
    const FrameStack y(spec.shape, data.observation);
    const RpcaConfig rc = rpca_config(cfg).resolved(y);
    const bool fbs = cfg.solver == SolverChoice::kFbs;
    const std::vector<double> params{double(cfg.clique_side), double(spec.frames), double(spec.rank), rc.lambda,
                                     rc.mu};
    RpcaResult res;
    std::vector<Emitted> rows;
    rows.push_back(guarded(base_row(cfg, trial, fbs ? "fbs" : "admm-prox", params), schema.metric_names.size(),
                           [&](CsvRow& row) {
                             res = fbs ? solve_rpca(y, rc) : rpca_prox_admm(y, rc);
                             const Eigen::MatrixXd& x0 = data.sparse.values();
                             const double threshold = 0.1 * x0.cwiseAbs().maxCoeff();
                             const SupportScores sc = support_scores(res.sparse.values(), x0, threshold);
                             row.metrics = {sc.f_measure,
                                            sc.precision,
                                            sc.recall,
                                            double(res.rank),
                                            relative_error(res.sparse.values(), x0),
                                            relative_error(res.low_rank.values(), data.low_rank.values()),
                                            res.report.objective_trace.empty() ? kNaN
                                                                               : res.report.objective_trace.back(),
                                            nonincreasing(res.report.objective_trace) ? 1.0 : 0.0,
                                            double(res.report.iterations),
                                            double(res.report.peak_aux_entries)};
                             row.termination = std::string(to_string(res.report.termination));
                           }));
    if (trial == 0 && !rows.back().row.failed) {
      const double range = symmetric_range(y.frame(0));
      save_image(cfg, "rpca_observed_f0", y.frame(0), -range, range, PgmDepth::k8);
      save_image(cfg, "rpca_background_f0", res.low_rank.frame(0), -range, range, PgmDepth::k8);
      save_image(cfg, "rpca_foreground_f0", res.sparse.frame(0), -range, range, PgmDepth::k8);
      if (cfg.write_images) {
        write_matrix(image_dir(cfg) / "rpca_background.bspm", res.low_rank.values());
        write_matrix(image_dir(cfg) / "rpca_foreground.bspm", res.sparse.values());
      }
    }
    return rows;
  });
}

ExperimentSummary run_memory(const ExperimentConfig& cfg) {
  const CsvSchema schema{{"clique_side", "pixels", "frames"},
                         {"measured_entries", "formula_entries", "ratio_to_fbs", "iterations"}};
  const GridShape shape{32, 32};
  const int frames = 10;
  return drive(cfg, schema, [&](int trial) {
    const SyntheticSpec spec = rpca_spec(cfg, trial, shape, frames);
    const SyntheticData data = gen_synthetic(spec);
    const FrameStack y(shape, data.observation);
    const std::size_t n = shape.size();
    const int l = cfg.clique_side;
    const std::vector<double> params{double(l), double(n), double(frames)};
    const double fbs_formula = double(fbs_rpca_storage_entries(n, frames));
    const double admm_formula = double(admm_rpca_storage_entries(l, n, frames));

    std::vector<Emitted> rows;
    rows.push_back(guarded(base_row(cfg, trial, "fbs", params), schema.metric_names.size(), [&](CsvRow& row) {
      RpcaConfig rc = rpca_config(cfg);
      AllocationTracker tracker;
      const RpcaResult res = solve_rpca(y, rc, &tracker);
      row.metrics = {double(tracker.peak()), fbs_formula, 1.0, double(res.report.iterations)};
      row.termination = std::string(to_string(res.report.termination));
    }));
    // Consensus ADMM keeps 2 l^2 clique copies and duals per frame plus the four
    // shared N x L buffers. The per-frame part is measured on one prox call.
    rows.push_back(guarded(base_row(cfg, trial, "admm", params), schema.metric_names.size(), [&](CsvRow& row) {
      const CliqueSystem cs(shape, l);
      ProxConfig pc;
      pc.lambda = cfg.lambda / cfg.mu;
      AllocationTracker tracker;
      const ProxResult pr = prox_J(y.frame(0), cs, pc, nullptr, &tracker);
      const double measured = double(tracker.peak()) * frames + fbs_formula;
      row.metrics = {measured, admm_formula, admm_formula / fbs_formula, double(pr.report.iterations)};
      row.termination = std::string(to_string(pr.report.termination));
    }));
    return rows;
  });
}

}  // namespace

std::string_view to_string(SolverChoice s) { return s == SolverChoice::kAdmm ? "admm" : "fbs"; }

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{kCsSweep, kRobustCs, kDenoise, kRpca, kMemory};
  return names;
}

ExperimentConfig ExperimentConfig::resolved() const {
  ExperimentConfig c = *this;
  const auto& names = experiment_names();
  if (std::find(names.begin(), names.end(), c.experiment) == names.end()) {
    throw ConfigError("unknown experiment '" + c.experiment + "'");
  }
  const bool cs = c.experiment == kCsSweep || c.experiment == kRobustCs;
  const bool rpca = c.experiment == kRpca || c.experiment == kMemory;

  if (c.trials == 0) c.trials = c.experiment == kRpca ? 3 : c.experiment == kMemory ? 1 : 20;
  if (c.clique_side == 0) c.clique_side = c.experiment == kMemory ? 10 : 2;
  if (c.k_sparsity == 0) c.k_sparsity = 40;
  if (c.mu == 0.0) c.mu = rpca ? 0.03 : 1.0;
  if (c.amplitude == 0.0) c.amplitude = cs ? 28.0 : 6.0;
  if (cs) {
    if (c.lambda < 0.0) c.lambda = 16.0;
    if (c.lambda_growth == 0.0) c.lambda_growth = 1.02;
    if (c.max_iters == 0) c.max_iters = 50;
  } else if (rpca) {
    if (c.lambda < 0.0) c.lambda = default_lambda(c.clique_side, 32 * 32);
    if (c.max_iters == 0) c.max_iters = c.experiment == kMemory ? 20 : (c.solver == SolverChoice::kFbs ? 500 : 200);
  } else if (c.max_iters == 0) {
    c.max_iters = 500;
  }
  if (cs && c.m_over_k.empty()) {
    c.m_over_k = c.experiment == kCsSweep ? std::vector<double>{1, 2, 3, 4, 5} : std::vector<double>{2};
  }
  if (c.snr_db.empty()) {
    if (c.experiment == kRobustCs) c.snr_db = {5, 10, 20, 30};
    if (c.experiment == kDenoise) c.snr_db = {20};
  }
  c.validate();
  return c;
}

void ExperimentConfig::validate() const {
  const auto& names = experiment_names();
  if (std::find(names.begin(), names.end(), experiment) == names.end()) {
    throw ConfigError("unknown experiment '" + experiment + "'");
  }
  if (trials < 1) throw ConfigError("--trials must be >= 1");
  if (jobs < 1) throw ConfigError("--jobs must be >= 1");
  if (clique_side < 1 || clique_side > 32) throw ConfigError("--clique-side must lie in [1, 32]");
  if (k_sparsity < 1 || k_sparsity > 32 * 32) throw ConfigError("--k-sparsity must lie in [1, 1024]");
  if (!(mu > 0.0) || !std::isfinite(mu)) throw ConfigError("--mu must be > 0");
  if (alpha < 0.0 || epsilon < 0.0) throw ConfigError("--alpha and --epsilon must be >= 0");
  if (!std::isfinite(lambda)) throw ConfigError("--lambda must be finite");
  if (max_iters < 1) throw ConfigError("max iterations must be >= 1");
  if (!(amplitude > 0.0) || !std::isfinite(amplitude)) throw ConfigError("--amplitude must be > 0");
  if (!(lambda_growth >= 1.0) && (experiment == kCsSweep || experiment == kRobustCs)) {
    throw ConfigError("--lambda-growth must be >= 1");
  }
  for (const double mk : m_over_k) {
    if (!(mk > 0.0) || !std::isfinite(mk)) throw ConfigError("--m-over-k values must be > 0");
  }
  for (const double s : snr_db) {
    if (std::isnan(s)) throw ConfigError("--snr-db values must not be NaN");
  }
  if (experiment == kDenoise && clique_side > 64) throw ConfigError("--clique-side exceeds the 64x64 image");
}

std::string ExperimentConfig::to_json() const {
  nlohmann::ordered_json j;
  j["experiment"] = experiment;
  j["seed"] = seed;
  j["trials"] = trials;
  j["jobs"] = jobs;
  j["out_dir"] = out_dir.string();
  j["clique_side"] = clique_side;
  j["lambda"] = lambda;
  j["lambda_growth"] = lambda_growth;
  j["mu"] = mu;
  j["alpha"] = alpha;
  j["epsilon"] = epsilon;
  j["k_sparsity"] = k_sparsity;
  j["m_over_k"] = m_over_k;
  j["snr_db"] = snr_db;
  j["solver"] = std::string(to_string(solver));
  j["max_iters"] = max_iters;
  j["amplitude"] = amplitude;
  j["write_images"] = write_images;
  j["csv_schema_version"] = kCsvSchemaVersion;
  return j.dump(2);
}

ExperimentSummary run_experiment(const ExperimentConfig& cfg_in) {
  const ExperimentConfig cfg = cfg_in.resolved();
  if (cfg.experiment == kCsSweep) return run_cs_sweep(cfg);
  if (cfg.experiment == kRobustCs) return run_robust_cs(cfg);
  if (cfg.experiment == kDenoise) return run_denoise(cfg);
  if (cfg.experiment == kRpca) return run_rpca(cfg);
  return run_memory(cfg);
}

}  // namespace blocksparse::harness
