// Reference vs serial vs OpenMP kernels on a 4096-node radial grid and a 16^4 periodic box (n = 2).
#include <benchmark/benchmark.h>

#include <memory>
#include <random>

#include "crf/flow/flow.hpp"
#include "crf/geometry/models.hpp"

using namespace crf;
using namespace crf::flow;

namespace {

struct Setup {
  std::shared_ptr<const Grid> grid;
  FlowState state;
  ScalarField u;
};

const Setup& setup(int which) {
  static const auto make = [](int w) {
    auto grid = std::make_shared<const Grid>(w == 0 ? Grid::radial(0.9, 4096) : Grid::box(2, 0.0, 2 * M_PI, 16, true));
    const auto g0 = w == 0 ? geom::perturbed_poincare(0.1, 0.5) : geom::hermitian_torus(0.3, 0.2);
    Setup s{grid, make_flow_state(grid, *g0, w == 0 ? BoundaryKind::Extrapolate : BoundaryKind::Periodic), {}};
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> U(-1, 1);
    s.u.resize(grid->size());
    for (auto& x : s.u) x = U(rng);
    return s;
  };
  static const Setup radial = make(0), box = make(1);
  return which == 0 ? radial : box;
}

enum Path { kReference, kSerial, kParallel };

void BM_ddbar(benchmark::State& st) {
  const auto& s = setup(static_cast<int>(st.range(0)));
  const auto path = static_cast<Path>(st.range(1));
  MatrixField out;
  for (auto _ : st) {
    if (path == kReference) ddbar_field_reference(*s.grid, s.u, out);
    else ddbar_field(*s.grid, s.u, out, path == kSerial ? Exec::Serial : Exec::Parallel);
    benchmark::DoNotOptimize(out.data());
  }
  st.SetItemsProcessed(st.iterations() * static_cast<long>(s.grid->size()));
}

void BM_ricci(benchmark::State& st) {
  const auto& s = setup(static_cast<int>(st.range(0)));
  const auto path = static_cast<Path>(st.range(1));
  MatrixField ric;
  for (auto _ : st) {
    if (path == kReference)
      ricci_field_reference(*s.grid, s.state.omega, s.state.ric0, s.state.det0, ric);
    else
      ricci_field(*s.grid, s.state.omega, s.state.ric0, s.state.det0, ric, path == kSerial ? Exec::Serial : Exec::Parallel);
    benchmark::DoNotOptimize(ric.data());
  }
  st.SetItemsProcessed(st.iterations() * static_cast<long>(s.grid->size()));
}

void BM_rk4_step(benchmark::State& st) {
  const auto& s = setup(static_cast<int>(st.range(0)));
  const auto exec = st.range(1) == kSerial ? Exec::Serial : Exec::Parallel;
  FlowState state = s.state;
  const double dt = cfl_bound(state, 0.2);
  for (auto _ : st) {
    st.PauseTiming();
    state = s.state;
    st.ResumeTiming();
    flow_step_metric(state, dt, exec, 0.2);
    benchmark::DoNotOptimize(state.omega.data());
  }
  st.SetItemsProcessed(st.iterations() * static_cast<long>(s.grid->size()));
}

void paths(benchmark::internal::Benchmark* b) {
  b->ArgNames({"grid", "path"});
  for (int g : {0, 1})
    for (int p : {kReference, kSerial, kParallel}) b->Args({g, p});
}

void exec_paths(benchmark::internal::Benchmark* b) {
  b->ArgNames({"grid", "path"});
  for (int g : {0, 1})
    for (int p : {kSerial, kParallel}) b->Args({g, p});
}

}  // namespace

// grid: 0 radial, 1 box n = 2; path: 0 reference, 1 serial, 2 parallel
BENCHMARK(BM_ddbar)->Apply(paths)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_ricci)->Apply(paths)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_rk4_step)->Apply(exec_paths)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
