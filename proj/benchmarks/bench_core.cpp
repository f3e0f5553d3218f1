#include <benchmark/benchmark.h>

#include "packetsim/ctrw.hpp"
#include "packetsim/density.hpp"
#include "packetsim/grid.hpp"
#include "packetsim/lattice.hpp"
#include "packetsim/lindblad.hpp"
#include "packetsim/potential.hpp"
#include "packetsim/propagate.hpp"

namespace {

using namespace packetsim;

void bench_unitary_step(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const PhaseGrid grid = PhaseGrid::make(n, 32.0);
  const Potential pot = harmonic_potential(grid, 1.0, 0.3);
  const EvolutionConfig cfg{1.0, 0.02};
  StateVector psi = make_gaussian_packet(grid, {-2.0, 0.5, 1.0});
  for (auto _ : state) {
    psi = evolve_unitary(psi, pot, cfg, cfg.dt);
    benchmark::DoNotOptimize(psi.amp.data());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(bench_unitary_step)->Arg(64)->Arg(128)->Arg(256);

void bench_husimi_field(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const PhaseGrid grid = PhaseGrid::make(n, 32.0);
  const StateVector psi = make_gaussian_packet(grid, {-2.0, 0.5, 1.0});
  const LatticeSpec ref = LatticeSpec::reference(grid, 1.0);
  for (auto _ : state) {
    PhaseSpaceField f = husimi_field(psi, ref);
    benchmark::DoNotOptimize(f.values.data());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(bench_husimi_field)->Arg(64)->Arg(128);

void bench_channel_apply(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const PhaseGrid grid = PhaseGrid::make(n, 32.0);
  const PacketChannel chan(grid, 1.0);
  const DensityMatrix rho =
      DensityMatrix::pure(make_gaussian_packet(grid, {-2.0, 0.5, 1.0}));
  for (auto _ : state) {
    Eigen::MatrixXcd out = chan.apply(rho.m);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(bench_channel_apply)->Arg(32)->Arg(64);

void bench_lindblad_rhs(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const PhaseGrid grid = PhaseGrid::make(n, 32.0);
  const Potential pot = harmonic_potential(grid, 1.0, 0.3);
  const CollapseChannelSet channels = PhaseSpaceChannels{1.0, 1.0};
  const PacketChannel chan(grid, 1.0);
  const DensityMatrix rho =
      DensityMatrix::pure(make_gaussian_packet(grid, {-2.0, 0.5, 1.0}));
  for (auto _ : state) {
    Eigen::MatrixXcd out = lindblad_rhs(rho.m, pot, 1.0, channels, chan);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(bench_lindblad_rhs)->Arg(32)->Arg(64);

void bench_walker_ensemble(benchmark::State& state) {
  const PhaseGrid grid = PhaseGrid::make(64, 32.0);
  const Potential pot = harmonic_potential(grid, 1.0, 0.3);
  const EvolutionConfig cfg{1.0, 0.02};
  const StateVector psi = make_gaussian_packet(grid, {-2.0, 0.5, 1.0});
  WalkerRunConfig wr;
  wr.tau = 1.0;
  wr.sigma = 1.0;
  wr.t_final = 2.0;
  wr.n_walkers = static_cast<int>(state.range(0));
  wr.base_seed = 42;
  for (auto _ : state) {
    WalkerEnsemble ens = run_walkers(psi, pot, cfg, wr);
    benchmark::DoNotOptimize(ens.walkers.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(bench_walker_ensemble)->Arg(8)->Arg(32);

void bench_identity_residual(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const PhaseGrid grid = PhaseGrid::make(n, 32.0);
  const LatticeSpec ref = LatticeSpec::reference(grid, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(identity_residual(grid, ref));
  }
}
BENCHMARK(bench_identity_residual)->Arg(32)->Arg(64);

}  // namespace

BENCHMARK_MAIN();
