// Serial against OpenMP for the hot kernels on the fixed-point grid.

#include <benchmark/benchmark.h>

#include <vector>

#include "hmfx/caloric.hpp"
#include "hmfx/field.hpp"
#include "hmfx/fixedpoint.hpp"
#include "hmfx/weighted.hpp"

using namespace hmfx;

namespace {

const MapField& data() {
  static const MapField u0 = corotational_caloric_field(
      make_space_grid(RadialGrid::graded(0.2, 0.25, 20), SphereGrid(25, 48)), 0.3);
  return u0;
}

Exec exec_of(const benchmark::State& state) { return state.range(0) ? Exec::OpenMP : Exec::Serial; }

void BM_WeightedLaplacian(benchmark::State& state) {
  const MapField& u = data();
  std::vector<double> out(u.data().size());
  for (auto _ : state) {
    apply_weighted_laplacian(u.grid(), u.components(), u.data().data(), out.data(), exec_of(state));
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(u.node_count()));
}

void BM_Gradient(benchmark::State& state) {
  const MapField& u = data();
  for (auto _ : state) benchmark::DoNotOptimize(gradient(u, exec_of(state)));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(u.node_count()));
}

void BM_DirichletApply(benchmark::State& state) {
  static const DirichletSolver solver(data(), 10.0, 0);
  const Eigen::VectorXd x = solver.pack(data());
  Eigen::VectorXd y(x.size());
  for (auto _ : state) {
    solver.apply(x, y, exec_of(state));
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(x.size()));
}

}  // namespace

BENCHMARK(BM_WeightedLaplacian)->ArgName("openmp")->Arg(0)->Arg(1);
BENCHMARK(BM_Gradient)->ArgName("openmp")->Arg(0)->Arg(1);
BENCHMARK(BM_DirichletApply)->ArgName("openmp")->Arg(0)->Arg(1);

BENCHMARK_MAIN();
