#include <benchmark/benchmark.h>

#include "rocfit/fitting.hpp"
#include "rocfit/kernels.hpp"
#include "rocfit/models.hpp"
#include "rocfit/numerics.hpp"

namespace {

rocfit::kernels::KernelGrid make_grid(std::size_t nodes) {
  const auto model = rocfit::RocModel::beta2(0.8, 2.5);
  const auto& rule = rocfit::numerics::cached_gauss_legendre(nodes);
  rocfit::kernels::KernelGrid grid;
  grid.gradient.resize(static_cast<Eigen::Index>(nodes), 2);
  for (std::size_t i = 0; i < nodes; ++i) {
    const double p = rule.nodes()[i];
    grid.nodes.push_back(p);
    grid.weights.push_back(rule.weights()[i]);
    grid.roc.push_back(rocfit::roc_eval(model, p));
    grid.slope.push_back(rocfit::roc_slope(model, p));
    const auto g = rocfit::param_gradient(model, p);
    grid.gradient(static_cast<Eigen::Index>(i), 0) = g.partials[0];
    grid.gradient(static_cast<Eigen::Index>(i), 1) = g.partials[1];
  }
  return grid;
}

void BM_QuadraticFormSerial(benchmark::State& state) {
  const auto grid = make_grid(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(rocfit::kernels::serial::kernel_quadratic_form(grid));
}

void BM_QuadraticFormOmp(benchmark::State& state) {
  const auto grid = make_grid(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(rocfit::kernels::omp::kernel_quadratic_form(grid));
}

// Replicate refits, the inner loop of the goodness-of-fit test.
template <void (*Run)(std::size_t, const std::function<void(std::size_t)>&)>
void BM_Replicates(benchmark::State& state) {
  const auto model = rocfit::RocModel::beta2(0.8, 2.5);
  rocfit::FitConfig config;
  config.optimizer.restarts = 2;
  const auto count = static_cast<std::size_t>(state.range(0));
  std::vector<double> out(count);
  for (auto _ : state) {
    Run(count, [&](std::size_t m) {
      rocfit::numerics::RandomStream rng(7, m);
      const auto curve = rocfit::empirical_roc(rocfit::sample_from_model(model, 250, 250, rng));
      out[m] = rocfit::fit_mde(curve, config).distance;
    });
    benchmark::DoNotOptimize(out.data());
  }
}

}  // namespace

BENCHMARK(BM_QuadraticFormSerial)->Arg(64)->Arg(128);
BENCHMARK(BM_QuadraticFormOmp)->Arg(64)->Arg(128);
BENCHMARK(BM_Replicates<rocfit::kernels::serial::run_indexed>)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Replicates<rocfit::kernels::omp::run_indexed>)->Arg(8)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
