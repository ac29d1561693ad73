// Parallel kernels against their serial references.
#include <benchmark/benchmark.h>

#include "divcap/capacity.hpp"
#include "divcap/content.hpp"
#include "divcap/frostman.hpp"
#include "divcap/weight_analysis.hpp"

using namespace divcap;

namespace {

const Weight& cantor_weight() {
  static const Weight w = Weight::cantor_distance(2, 0.5, 0.25);
  return w;
}

// A cover whose balls do not use the self-similar fast path.
Cover shifted_cover() {
  Cover c = canonical_cover(CantorSpec::from_dimension(2, 1.0, 3));
  for (auto& b : c.balls) b.center[0] += 0.3 * b.radius;
  return c;
}

void BM_cover_sum(benchmark::State& st) {
  const Weight w = Weight::radial_power(-0.5, Point{0.37, 0.41});
  const Cover c = shifted_cover();
  const QuadratureConfig q{.rel_tol = 1e-4};
  for (auto _ : st) benchmark::DoNotOptimize(st.range(0) ? cover_sum(w, c, q).value : cover_sum_serial(w, c, q).value);
}
BENCHMARK(BM_cover_sum)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_frostman(benchmark::State& st) {
  const auto mu = natural_measure(CantorSpec::from_dimension(2, 0.5, 2));
  const auto balls = default_ball_sample(mu);
  const QuadratureConfig q{.rel_tol = 1e-2};
  for (auto _ : st) {
    benchmark::DoNotOptimize(st.range(0) ? frostman_constant(mu, cantor_weight(), balls, q).C_hat
                                         : frostman_constant_serial(mu, cantor_weight(), balls, q).C_hat);
  }
}
BENCHMARK(BM_frostman)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_doubling(benchmark::State& st) {
  const Weight w = Weight::radial_power(-0.5, Point{0.0, 0.0});
  const Box region = Box::cube(2, -1.0, 1.0);
  const QuadratureConfig q{.rel_tol = 1e-4};
  for (auto _ : st) {
    benchmark::DoNotOptimize(st.range(0) ? estimate_doubling(w, region, 64, q).C_D
                                         : estimate_doubling_serial(w, region, 64, q).C_D);
  }
}
BENCHMARK(BM_doubling)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

struct KernelFixture {
  GridField grid{Box::cube(3, -1.0, 1.0), 48};
  EnergyKernel kernel;
  std::vector<double> phi;
  KernelFixture()
      : kernel(grid, cell_weights(Weight::constant(3), grid, 1e6), 2.0, CapacityVariant::sobolev),
        phi(grid.node_count()) {
    for (std::size_t i = 0; i < phi.size(); ++i) phi[i] = std::max(0.0, 1.0 - norm(grid.node(i)));
  }
};

void BM_energy(benchmark::State& st) {
  static const KernelFixture f;
  for (auto _ : st) benchmark::DoNotOptimize(st.range(0) ? f.kernel.energy(f.phi) : f.kernel.energy_serial(f.phi));
}
BENCHMARK(BM_energy)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_gradient(benchmark::State& st) {
  static const KernelFixture f;
  std::vector<double> g;
  for (auto _ : st) {
    if (st.range(0)) {
      f.kernel.gradient(f.phi, g);
    } else {
      f.kernel.gradient_serial(f.phi, g);
    }
    benchmark::DoNotOptimize(g.data());
  }
}
BENCHMARK(BM_gradient)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
