#include <benchmark/benchmark.h>

#include "slidemesh/geometry_cut.hpp"
#include "slidemesh/harness.hpp"
#include "slidemesh/solver.hpp"

namespace {

using namespace slidemesh;

void BM_AssembleTaylorGreen(benchmark::State& state) {
  const int level = static_cast<int>(state.range(0));
  const TaylorGreen tg{0.1};
  CoupledSolver solver(make_taylor_green_problem(level, true, 30.0, tg));
  for (auto _ : state) {
    AssembledSystem sys = solver.assemble();
    benchmark::DoNotOptimize(sys.residual.data());
  }
}
BENCHMARK(BM_AssembleTaylorGreen)->Arg(0)->Arg(1)->Arg(2);

void BM_AnnulusCutRebuild(benchmark::State& state) {
  const int level = static_cast<int>(state.range(0));
  CoupledSolver solver(make_annulus_problem(level, 1.0, 30.0, true, 1e-3, 1));
  for (auto _ : state) {
    solver.advance_configuration(1e-3);
  }
}
BENCHMARK(BM_AnnulusCutRebuild)->Arg(0)->Arg(1)->Arg(2);

void BM_PolygonIntersection(benchmark::State& state) {
  ConvexPolygon p({{0.0, 0.0}, {1.0, 0.0}, {1.2, 0.8}, {0.4, 1.3}, {-0.2, 0.6}});
  ConvexPolygon q({{0.3, -0.2}, {1.4, 0.3}, {1.0, 1.1}, {0.1, 0.9}});
  for (auto _ : state) {
    auto cut = intersect_convex_polygons(p, q);
    benchmark::DoNotOptimize(cut);
  }
}
BENCHMARK(BM_PolygonIntersection);

}  // namespace

BENCHMARK_MAIN();
