#include <benchmark/benchmark.h>

#include <limits>
#include <vector>

#include "snne/eval.hpp"
#include "snne/losses.hpp"
#include "snne/matrix.hpp"
#include "snne/model.hpp"
#include "snne/preprocess.hpp"
#include "snne/rng.hpp"
#include "snne/tape.hpp"

namespace {

snne::Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  snne::Rng rng(seed);
  snne::Matrix m(rows, cols);
  for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = rng.gaussian();
  return m;
}

void bm_matmul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const snne::Matrix a = random_matrix(n, n, 1);
  const snne::Matrix b = random_matrix(n, n, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(snne::matmul(a, b));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(n * n * n));
}
BENCHMARK(bm_matmul)->Arg(64)->Arg(256)->Arg(512);

snne::SnnSpec bench_spec() {
  snne::SnnSpec spec;
  spec.input_dim = 32;
  spec.hidden_dim = 128;
  spec.trunk_layers = 4;
  spec.upper_layers = 2;
  spec.projection_dim = 32;
  return spec;
}

void bm_forward(benchmark::State& state) {
  const auto batch = static_cast<std::size_t>(state.range(0));
  const snne::SnnModel model = snne::lecun_init(bench_spec(), 3);
  const snne::Matrix x = random_matrix(batch, 32, 4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(snne::forward(model, x));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(batch));
}
BENCHMARK(bm_forward)->Arg(32)->Arg(256);

void bm_train_step(benchmark::State& state) {
  const auto batch = static_cast<std::size_t>(state.range(0));
  snne::SnnModel model = snne::lecun_init(bench_spec(), 5);
  const snne::Matrix x = random_matrix(batch, 32, 6);
  snne::Rng rng(7);
  std::vector<double> y(batch);
  std::vector<int> ids(batch);
  for (std::size_t i = 0; i < batch; ++i) {
    y[i] = rng.gaussian();
    ids[i] = static_cast<int>(i % 10);
  }
  const snne::MultitaskLoss loss_cfg;
  snne::Rng dropout_rng(8);
  for (auto _ : state) {
    snne::Tape tape;
    const auto f = snne::forward_on_tape(tape, model, x, true, &dropout_rng);
    tape.backward(snne::combined_loss_node(tape, loss_cfg, f.mu, f.sigma,
                                           f.projection, y, ids));
    benchmark::DoNotOptimize(tape.grad(f.params[0]));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(batch));
}
BENCHMARK(bm_train_step)->Arg(64)->Arg(256);

void bm_retention_curve(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  snne::Rng rng(9);
  std::vector<double> sq(n), unc(n);
  for (std::size_t i = 0; i < n; ++i) {
    sq[i] = rng.uniform();
    unc[i] = rng.uniform();
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(snne::retention_curve(sq, unc));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(n));
}
BENCHMARK(bm_retention_curve)->Arg(1000)->Arg(100000);

void bm_pipeline_fit(benchmark::State& state) {
  const auto rows = static_cast<std::size_t>(state.range(0));
  snne::Rng rng(10);
  snne::FeatureMatrix x(rows, 16);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < 16; ++c)
      x(r, c) = rng.uniform() < 0.05 ? std::numeric_limits<double>::quiet_NaN()
                                     : rng.gaussian();
  std::vector<double> y(rows);
  for (auto& v : y) v = rng.gaussian();
  const snne::PreprocessConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(snne::fit_pipeline(x, y, cfg));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(rows));
}
BENCHMARK(bm_pipeline_fit)->Arg(2000);

}  // namespace

BENCHMARK_MAIN();
