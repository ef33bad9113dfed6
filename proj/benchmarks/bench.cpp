// Microbenchmarks for the hot paths: bilinear-form assembly, the direct
// factorization behind the source-problem solve, and one full eigenvalue
// solve.  The range argument is the number of mesh cells per unit length.

#include <benchmark/benchmark.h>

#include <maxip/harness.hpp>
#include <maxip/solvers.hpp>

using namespace maxip;

namespace {

struct Setup {
  FeSystem fe;
  CoefficientField co;
  PenaltyParams params;
};

Setup checkerboard_setup(int cells_per_unit, int degree) {
  const DomainSpec dom{DomainKind::square_checkerboard};
  Setup s{build_system(make_mesh(dom, 1.0 / cells_per_unit, MeshStyle::structured),
                       degree + 1),
          checkerboard_coefficients(0.5),
          {}};
  s.params.alpha = 0.7;
  return s;
}

}  // namespace

static void BM_assemble_form(benchmark::State& state) {
  const Setup s = checkerboard_setup(static_cast<int>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(assemble_ah(s.fe, s.co, s.params));
  state.SetItemsProcessed(state.iterations() * s.fe.mesh.num_triangles());
  state.counters["dofs"] = s.fe.total_dofs();
}
BENCHMARK(BM_assemble_form)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

static void BM_assemble_form_deg2(benchmark::State& state) {
  const Setup s = checkerboard_setup(static_cast<int>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(assemble_ah(s.fe, s.co, s.params));
  state.SetItemsProcessed(state.iterations() * s.fe.mesh.num_triangles());
  state.counters["dofs"] = s.fe.total_dofs();
}
BENCHMARK(BM_assemble_form_deg2)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

static void BM_factorize(benchmark::State& state) {
  const Setup s = checkerboard_setup(static_cast<int>(state.range(0)), 1);
  const SparseMatrix a = assemble_ah(s.fe, s.co, s.params);
  for (auto _ : state) benchmark::DoNotOptimize(factorize(a));
  state.counters["dofs"] = s.fe.total_dofs();
}
BENCHMARK(BM_factorize)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

static void BM_solve_after_factorize(benchmark::State& state) {
  const Setup s = checkerboard_setup(static_cast<int>(state.range(0)), 1);
  const Factorization f = factorize(assemble_ah(s.fe, s.co, s.params));
  const Eigen::VectorXd rhs = Eigen::VectorXd::Ones(s.fe.total_dofs());
  for (auto _ : state) benchmark::DoNotOptimize(f.solve(rhs));
  state.counters["dofs"] = s.fe.total_dofs();
}
BENCHMARK(BM_solve_after_factorize)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

static void BM_eigensolve(benchmark::State& state) {
  const Setup s = checkerboard_setup(static_cast<int>(state.range(0)), 1);
  for (auto _ : state) {
    const EigenResult r = solve_eigs(s.fe, s.co, s.params, 4, 1e-8);
    benchmark::DoNotOptimize(r.values.data());
  }
  state.counters["dofs"] = s.fe.total_dofs();
}
BENCHMARK(BM_eigensolve)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
