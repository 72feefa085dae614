#include <string>

#include <benchmark/benchmark.h>

#include "blbayes/data.hpp"
#include "blbayes/engine.hpp"
#include "blbayes/log_sigma.hpp"
#include "blbayes/sampling.hpp"

namespace {

using namespace blbayes;

SpdMatrix test_spd(Index n) {
  RngStream rng(3, 0);
  Matrix a(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) a(i, j) = rng.normal();
  return SpdMatrix(Matrix(a * a.transpose() / static_cast<double>(n) + Matrix::Identity(n, n)));
}

const ModelInputs& demo_inputs() {
  static const ModelInputs inputs = model_inputs(compute_returns(
      load_price_panel(std::string(BLBAYES_DATA_DIR) + "/demo_prices.csv"), 21, parse_date("2018-01-02")));
  return inputs;
}

ViewSet demo_views() {
  Matrix p(2, 4);
  p << -1, 1, 0, 0, 0, 0, 1, -1;
  return ViewSet(p, Vector{{0.02, 0.05}}, Vector{{1e-4, 1e-4}});
}

void BM_BuildQ(benchmark::State& state) {
  const SpdMatrix s = test_spd(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(build_Q(s, 21));
}
BENCHMARK(BM_BuildQ)->Arg(4)->Arg(8)->Arg(16);

void BM_InverseWishartDraw(benchmark::State& state) {
  const Index n = state.range(0);
  const SpdMatrix scale = test_spd(n);
  RngStream rng(5, 0);
  for (auto _ : state) benchmark::DoNotOptimize(sample_inverse_wishart(static_cast<double>(n + 2), scale, rng));
}
BENCHMARK(BM_InverseWishartDraw)->Arg(4)->Arg(8)->Arg(16);

// Whole chains of 1000 iterations on the bundled demo data.
void BM_Chain(benchmark::State& state) {
  ModelConfig cfg;
  cfg.model = static_cast<ModelId>(state.range(0));
  cfg.iterations = 1000;
  cfg.burn = 100;
  const ViewSet views = demo_views();
  for (auto _ : state) benchmark::DoNotOptimize(fit_model(demo_inputs(), views, cfg));
  state.SetLabel(std::string(model_name(cfg.model)));
  state.SetItemsProcessed(state.iterations() * cfg.iterations);
}
BENCHMARK(BM_Chain)
    ->Arg(static_cast<int>(ModelId::iw_augmented))
    ->Arg(static_cast<int>(ModelId::iw_nonsquare))
    ->Arg(static_cast<int>(ModelId::log_sigma))
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
