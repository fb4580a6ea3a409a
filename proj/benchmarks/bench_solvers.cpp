#include <benchmark/benchmark.h>

#include "sdgame/certify.hpp"
#include "sdgame/game.hpp"
#include "sdgame/instances.hpp"
#include "sdgame/measure.hpp"
#include "sdgame/oracle.hpp"
#include "sdgame/snell.hpp"

using namespace sdgame;

namespace {

Lattice base(const char* name) {
  const Instance& inst = instance(name);
  return build_lattice(inst.spec, inst.base.steps, inst.base.nodes_per_dim);
}

void BM_SolveGame(benchmark::State& state) {
  const Instance& inst = instance("bang-bang-1d");
  const Lattice lat = build_lattice(inst.spec, static_cast<int>(state.range(0)), inst.base.nodes_per_dim);
  for (auto _ : state) benchmark::DoNotOptimize(solve_game(lat).V(0, lat.root()));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SolveGame)->RangeMultiplier(2)->Range(200, 800)->Complexity(benchmark::oN);

void BM_SnellSolve(benchmark::State& state) {
  const Lattice lat = base("bang-bang-1d");
  const Policy u = Policy::uniform_random(lat, 3);
  for (auto _ : state) benchmark::DoNotOptimize(snell_solve(lat, u).Z(0, lat.root()));
}
BENCHMARK(BM_SnellSolve);

void BM_Enumerate(benchmark::State& state) {
  const Instance& inst = instance("bang-bang-1d");
  const Lattice lat = build_lattice(inst.spec, inst.tiny.steps, inst.tiny.nodes_per_dim);
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_values(lat).upper);
}
BENCHMARK(BM_Enumerate);

void BM_CertifySaddle(benchmark::State& state) {
  const Lattice lat = base("bang-bang-1d");
  const ValueField f = solve_game(lat);
  for (auto _ : state) benchmark::DoNotOptimize(certify_saddle(f, lat, f.ustar, f.rho0, 100, 1).verdict());
}
BENCHMARK(BM_CertifySaddle)->Unit(benchmark::kMillisecond);

void BM_ExpectedPayoff(benchmark::State& state) {
  const Lattice lat = base("bang-bang-1d");
  const ValueField f = solve_game(lat);
  const auto mode = state.range(0) ? PayoffMode::direct : PayoffMode::reweight;
  for (auto _ : state) benchmark::DoNotOptimize(expected_payoff(lat, f.ustar, f.rho0, mode, 10000, 7).estimate);
  state.SetItemsProcessed(state.iterations() * 10000);
}
BENCHMARK(BM_ExpectedPayoff)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
