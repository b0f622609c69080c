#include "blocksparse/clique_system.hpp"
#include "blocksparse/fbs_rpca.hpp"
#include "blocksparse/prox_admm.hpp"
#include "blocksparse/regularizer.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace bs = blocksparse;

namespace {

bs::ImageGrid random_image(bs::GridShape shape, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  bs::ImageGrid img(shape);
  for (Eigen::Index i = 0; i < img.values().size(); ++i) img.values()[i] = normal(rng);
  return img;
}

bs::FrameStack random_stack(bs::GridShape shape, int frames, unsigned seed) {
  bs::FrameStack y(shape, frames);
  for (int t = 0; t < frames; ++t) y.set_frame(t, random_image(shape, seed + t));
  return y;
}

void BM_GradNaive(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int l = static_cast<int>(state.range(1));
  const bs::CliqueSystem cs({n, n}, l);
  const bs::ImageGrid x = random_image({n, n}, 1);
  const bs::SmoothingParam sp(1e-3);
  for (auto _ : state) benchmark::DoNotOptimize(bs::grad_J_eps_naive(x, cs, sp));
}
BENCHMARK(BM_GradNaive)->Args({64, 2})->Args({64, 4})->Args({64, 8})->Args({64, 16});

void BM_GradFft(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int l = static_cast<int>(state.range(1));
  const bs::CliqueSystem cs({n, n}, l);
  const bs::ImageGrid x = random_image({n, n}, 1);
  const bs::SmoothingParam sp(1e-3);
  for (auto _ : state) benchmark::DoNotOptimize(bs::grad_J_eps_fft(x, cs, sp));
}
BENCHMARK(BM_GradFft)->Args({64, 2})->Args({64, 4})->Args({64, 8})->Args({64, 16});

void BM_ProxAdmm(benchmark::State& state) {
  const int l = static_cast<int>(state.range(0));
  const bs::CliqueSystem cs({32, 32}, l);
  const bs::ImageGrid v = random_image({32, 32}, 2);
  bs::ProxConfig cfg;
  cfg.lambda = 1.0;
  for (auto _ : state) benchmark::DoNotOptimize(bs::prox_J(v, cs, cfg));
}
BENCHMARK(BM_ProxAdmm)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

// Fixed-step iterations, so every run does the same work.
void BM_RpcaIterations(benchmark::State& state) {
  const int l = static_cast<int>(state.range(0));
  const bs::FrameStack y = random_stack({64, 64}, 10, 3);
  bs::RpcaConfig cfg;
  cfg.clique_side = l;
  cfg.step = bs::StepPolicy::kFixed;
  cfg.max_iters = 10;
  cfg.tol_obj = 0.0;
  for (auto _ : state) benchmark::DoNotOptimize(bs::solve_rpca(y, cfg));
  state.counters["iters"] = 10;
}
BENCHMARK(BM_RpcaIterations)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
