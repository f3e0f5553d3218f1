#include <cmath>
#include <vector>

#include "doctest.h"
#include "packetsim/ctrw.hpp"
#include "packetsim/parallel.hpp"

using namespace packetsim;

namespace {

const PhaseGrid kGrid = PhaseGrid::make(32, 16.0);

struct ThreadGuard {
  explicit ThreadGuard(int n) { set_max_threads(n); }
  ~ThreadGuard() { set_max_threads(1); }
};

bool same_jumps(const std::vector<Walker>& a, const std::vector<Walker>& b,
                std::size_t count) {
  for (std::size_t i = 0; i < count; ++i) {
    if (a[i].jumps.size() != b[i].jumps.size()) return false;
    if (a[i].final_wait != b[i].final_wait) return false;
    for (std::size_t k = 0; k < a[i].jumps.size(); ++k) {
      const JumpEvent &x = a[i].jumps[k], &y = b[i].jumps[k];
      if (x.t != y.t || x.x != y.x || x.p != y.p) return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("kernel and source fields carry the decayed jump-rate mass") {
  const Potential v = free_potential(kGrid);
  const EvolutionConfig cfg{1.0, 0.01};
  const double tau = 0.7, sigma = 1.2;
  const LatticeSpec lat = LatticeSpec::reference(kGrid, sigma);

  const PhaseSpaceField k = kernel_psi(kGrid, 0.5, -0.3, 0.3, v, cfg, tau, lat);
  CHECK(k.total_mass() == doctest::Approx(std::exp(-0.3 / tau) / tau).epsilon(1e-9));
  CHECK(k.values.minCoeff() >= 0.0);

  const StateVector psi0 = make_gaussian_packet(kGrid, {0.5, -0.3, sigma});
  const PhaseSpaceField s = source_s(psi0, 0.2, 0.9, v, cfg, tau, lat);
  CHECK(s.total_mass() == doctest::Approx(std::exp(-0.7 / tau) / tau).epsilon(1e-9));

  const PhaseSpaceField s2 =
      source_s(DensityMatrix::pure(psi0), 0.2, 0.9, v, cfg, tau, lat);
  CHECK((s.values - s2.values).abs().maxCoeff() < 1e-12);

  CHECK_THROWS_AS(kernel_psi(kGrid, 0.0, 0.0, -0.1, v, cfg, tau, lat), PreconditionError);
  CHECK_THROWS_AS(kernel_psi(kGrid, 0.0, 0.0, 0.3, v, cfg, 0.0, lat), PreconditionError);
  CHECK_THROWS_AS(source_s(psi0, 0.5, 0.2, v, cfg, tau, lat), PreconditionError);
}

TEST_CASE("kernel quadrature over destination and age integrates to one") {
  const EvolutionConfig cfg{1.0, 0.01};
  const double tau = 0.6;
  const LatticeSpec lat = LatticeSpec::reference(kGrid, 1.1);

  const Potential vf = free_potential(kGrid);
  const double kf = kernel_normalization(kGrid, 0.5, 0.4, vf, cfg, tau, lat, 8.0 * tau, 64);
  CHECK(std::abs(kf - 1.0) < 1.5e-3);

  const Potential vh = harmonic_potential(kGrid, 1.0, 0.3);
  const double kh = kernel_normalization(kGrid, 1.0, 0.0, vh, cfg, tau, lat, 8.0 * tau, 64);
  CHECK(std::abs(kh - 1.0) < 1.5e-3);

  // Simpson rule demands an even interval count
  CHECK_THROWS_AS(kernel_normalization(kGrid, 0.5, 0.4, vf, cfg, tau, lat, 8.0 * tau, 63),
                  PreconditionError);
}

TEST_CASE("source quadrature holds for superposition initial states") {
  const EvolutionConfig cfg{1.0, 0.01};
  const double tau = 0.6;
  const LatticeSpec lat = LatticeSpec::reference(kGrid, 1.1);
  const Potential v = harmonic_potential(kGrid, 1.0, 0.3);
  StateVector cat = make_gaussian_packet(kGrid, {1.5, 0.0, 1.1});
  cat.amp += make_gaussian_packet(kGrid, {-1.5, 0.0, 1.1}).amp;
  cat.renormalize();
  const double s = source_normalization(cat, v, cfg, tau, lat, 8.0 * tau, 64);
  CHECK(std::abs(s - 1.0) < 1.5e-3);
}

TEST_CASE("walker runs validate their configuration") {
  const Potential v = free_potential(kGrid);
  const EvolutionConfig cfg{1.0, 0.01};
  const StateVector psi0 = make_gaussian_packet(kGrid, {0.0, 0.5, 1.2});
  WalkerRunConfig run;
  run.tau = 0.5;
  run.sigma = 1.2;
  run.t_final = 1.0;
  run.n_walkers = 4;
  auto fails = [&](auto mutate) {
    WalkerRunConfig bad = run;
    mutate(bad);
    CHECK_THROWS_AS(run_walkers(psi0, v, cfg, bad), PreconditionError);
  };
  fails([](WalkerRunConfig& r) { r.tau = 0.0; });
  fails([](WalkerRunConfig& r) { r.sigma = 0.0; });
  fails([](WalkerRunConfig& r) { r.n_walkers = 0; });
  fails([](WalkerRunConfig& r) { r.t_final = 0.0; });
  fails([](WalkerRunConfig& r) { r.sample_times = {0.8, 0.2}; });
  fails([](WalkerRunConfig& r) { r.sample_times = {2.0}; });
}

TEST_CASE("walker histories are well-formed and waiting times are exponential") {
  const Potential v = free_potential(kGrid);
  const EvolutionConfig cfg{1.0, 0.01};
  const StateVector psi0 = make_gaussian_packet(kGrid, {0.0, 0.5, 1.2});
  WalkerRunConfig run;
  run.tau = 0.5;
  run.sigma = 1.2;
  run.t_final = 2.0;
  run.n_walkers = 400;
  run.base_seed = 20260819;
  run.sample_times = {0.4, 1.2, 2.0};
  const WalkerEnsemble ens = run_walkers(psi0, v, cfg, run);

  REQUIRE(ens.walkers.size() == 400);
  REQUIRE(ens.mean_fields.size() == 3);
  std::size_t total_jumps = 0;
  for (std::size_t i = 0; i < ens.walkers.size(); ++i) {
    const Walker& w = ens.walkers[i];
    CHECK(w.index == i);
    CHECK(w.collapsed == !w.jumps.empty());
    CHECK(w.final_wait > 0.0);
    double prev = w.t0;
    for (const JumpEvent& ev : w.jumps) {
      CHECK(ev.t > prev);
      CHECK(ev.t <= w.t_final);
      CHECK(std::abs(ev.x) <= 0.5 * kGrid.box_length);
      prev = ev.t;
    }
    CHECK(prev + w.final_wait > w.t_final);  // the last draw overshoots
    total_jumps += w.jumps.size();
  }
  for (const PhaseSpaceField& f : ens.mean_fields)
    CHECK(f.total_mass() == doctest::Approx(1.0).epsilon(1e-9));

  const std::vector<double> waits = waiting_times(ens.walkers);
  REQUIRE(waits.size() == total_jumps + ens.walkers.size());
  const double n = static_cast<double>(waits.size());
  double mean = 0.0;
  for (double t : waits) mean += t;
  mean /= n;
  CHECK(std::abs(mean - run.tau) < 5.0 * run.tau / std::sqrt(n));
  CHECK(ks_statistic_exponential(waits, run.tau) < 1.628 / std::sqrt(n));

  CHECK_THROWS_AS(ks_statistic_exponential({}, 1.0), PreconditionError);
  CHECK_THROWS_AS(ks_statistic_exponential({0.5}, 0.0), PreconditionError);
}

TEST_CASE("walker replay is bit-identical per (seed, index) and across thread counts") {
  const Potential v = free_potential(kGrid);
  const EvolutionConfig cfg{1.0, 0.01};
  const StateVector psi0 = make_gaussian_packet(kGrid, {0.0, 0.5, 1.2});
  WalkerRunConfig run;
  run.tau = 0.5;
  run.sigma = 1.2;
  run.t_final = 2.0;
  run.n_walkers = 60;
  run.base_seed = 777;
  run.sample_times = {1.0, 2.0};

  const WalkerEnsemble a = run_walkers(psi0, v, cfg, run);
  const WalkerEnsemble b = run_walkers(psi0, v, cfg, run);
  CHECK(same_jumps(a.walkers, b.walkers, a.walkers.size()));

  // a shorter run of the same base seed reproduces the same leading walkers
  WalkerRunConfig small = run;
  small.n_walkers = 20;
  const WalkerEnsemble c = run_walkers(psi0, v, cfg, small);
  CHECK(same_jumps(a.walkers, c.walkers, 20));

  {
    ThreadGuard guard(3);
    const WalkerEnsemble d = run_walkers(psi0, v, cfg, run);
    CHECK(same_jumps(a.walkers, d.walkers, a.walkers.size()));
    for (std::size_t k = 0; k < a.mean_fields.size(); ++k)
      CHECK((a.mean_fields[k].values - d.mean_fields[k].values).abs().maxCoeff() == 0.0);
  }
}

TEST_CASE("ensemble reconstruction matches the in-run sampling") {
  const Potential v = free_potential(kGrid);
  const EvolutionConfig cfg{1.0, 0.01};
  const StateVector psi0 = make_gaussian_packet(kGrid, {0.0, 0.5, 1.2});
  WalkerRunConfig run;
  run.tau = 0.5;
  run.sigma = 1.2;
  run.t_final = 2.0;
  run.n_walkers = 50;
  run.base_seed = 40490;
  run.sample_times = {0.0, 2.0};
  const WalkerEnsemble ens = run_walkers(psi0, v, cfg, run);

  // at t = 0 nothing has jumped: the field is the initial packet's husimi
  const PhaseSpaceField h0 = husimi_field(psi0, ens.mean_fields[0].spec);
  CHECK(field_l1_distance(ens.mean_fields[0], h0) < 1e-12);

  // at the final time, replaying the jump log reproduces the sampled field
  const PhaseSpaceField rec =
      ensemble_field_at(ens.walkers, psi0, v, cfg, run.sigma, 2.0);
  CHECK(field_l1_distance(ens.mean_fields[1], rec) < 1e-9);

  CHECK_THROWS_AS(ensemble_field_at(ens.walkers, psi0, v, cfg, run.sigma, 3.0),
                  PreconditionError);
}

TEST_CASE("empirical jump-rate fields count events in the trailing window") {
  const Potential v = free_potential(kGrid);
  const EvolutionConfig cfg{1.0, 0.01};
  const StateVector psi0 = make_gaussian_packet(kGrid, {0.0, 0.5, 1.2});
  WalkerRunConfig run;
  run.tau = 0.5;
  run.sigma = 1.2;
  run.t_final = 2.0;
  run.n_walkers = 200;
  run.base_seed = 11;
  const WalkerEnsemble ens = run_walkers(psi0, v, cfg, run);

  const double t = 1.5, bw = 0.5;
  const EmpiricalField emp = empirical_r(ens.walkers, ens.mean_fields.empty()
                                             ? LatticeSpec::reference(kGrid, run.sigma)
                                             : ens.mean_fields[0].spec,
                                         kGrid.hbar, run.tau, t, bw);
  CHECK_FALSE(emp.high_variance);
  std::size_t count = 0;
  for (const Walker& w : ens.walkers)
    for (const JumpEvent& ev : w.jumps)
      if (ev.t > t - bw && ev.t <= t) ++count;
  const double mass = static_cast<double>(count) / (run.n_walkers * bw);
  CHECK(emp.field.total_mass() == doctest::Approx(mass).epsilon(1e-12));

  CHECK(empirical_r(ens.walkers, emp.field.spec, kGrid.hbar, run.tau, t, 0.04)
            .high_variance);
  CHECK_THROWS_AS(empirical_r(ens.walkers, emp.field.spec, kGrid.hbar, run.tau, t, 0.0),
                  PreconditionError);
}
