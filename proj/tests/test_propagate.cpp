#include <cmath>
#include <complex>

#include "doctest.h"
#include "packetsim/propagate.hpp"

using namespace packetsim;

TEST_CASE("evolution validation rejects aliasing steps and foreign grids") {
  const PhaseGrid g = PhaseGrid::make(64, 32.0);
  const Potential v = harmonic_potential(g, 1.0, 0.5);
  CHECK_NOTHROW(validate_evolution(g, v, {1.0, 0.005}));
  CHECK_THROWS_AS(validate_evolution(g, v, {1.0, 5.0}), PreconditionError);
  CHECK_THROWS_AS(validate_evolution(g, v, {1.0, 0.0}), PreconditionError);
  CHECK_THROWS_AS(validate_evolution(g, v, {0.0, 0.01}), PreconditionError);

  const Potential other = harmonic_potential(PhaseGrid::make(32, 32.0), 1.0, 0.5);
  CHECK_THROWS_AS(validate_evolution(g, other, {1.0, 0.005}), PreconditionError);
}

TEST_CASE("free propagation reproduces the drifting, spreading packet") {
  const PhaseGrid g = PhaseGrid::make(128, 64.0);
  const Potential v = free_potential(g);
  const double m = 2.0, x0 = -5.0, p0 = 1.5, sigma = 1.2, T = 4.0;
  const StateVector psi0 = make_gaussian_packet(g, {x0, p0, sigma});
  const StateVector psi = evolve_unitary(psi0, v, {m, 0.01}, T);

  CHECK(std::abs(psi.norm() - 1.0) < 1e-13);
  CHECK(mean_x(psi) == doctest::Approx(x0 + p0 * T / m).epsilon(1e-9));
  const double spread = g.hbar * T / (2.0 * m * sigma);
  CHECK(var_x(psi) == doctest::Approx(sigma * sigma + spread * spread).epsilon(1e-9));
  CHECK(mean_p(psi) == doctest::Approx(p0).epsilon(1e-9));
  CHECK(var_p(psi) ==
        doctest::Approx(g.hbar * g.hbar / (4.0 * sigma * sigma)).epsilon(1e-10));
}

TEST_CASE("a width-matched packet rotates rigidly in the harmonic well") {
  const PhaseGrid g = PhaseGrid::make(64, 32.0);
  const double m = 1.0, w = 0.5;
  const Potential v = harmonic_potential(g, m, w);
  const double sigma = std::sqrt(g.hbar / (2.0 * m * w));  // = 1
  const StateVector psi0 = make_gaussian_packet(g, {2.0, 0.0, sigma});
  const EvolutionConfig cfg{m, 0.002};

  const StateVector quarter = evolve_unitary(psi0, v, cfg, 0.5 * kPi / w);
  CHECK(std::abs(mean_x(quarter)) < 1e-4);
  CHECK(mean_p(quarter) == doctest::Approx(-2.0 * m * w).epsilon(1e-4));
  CHECK(var_x(quarter) == doctest::Approx(sigma * sigma).epsilon(1e-4));

  const StateVector full = evolve_unitary(psi0, v, cfg, 2.0 * kPi / w);
  CHECK(std::norm(overlap(psi0, full)) > 1.0 - 1e-5);
}

TEST_CASE("split-operator stepping converges at second order") {
  const PhaseGrid g = PhaseGrid::make(64, 32.0);
  const Potential v = harmonic_potential(g, 1.0, 0.7);
  const StateVector psi0 = make_gaussian_packet(g, {1.5, -0.5, 1.1});
  const double T = 1.0;
  const StateVector ref = evolve_unitary(psi0, v, {1.0, T / 800.0}, T);
  const StateVector a = evolve_unitary(psi0, v, {1.0, T / 50.0}, T);
  const StateVector b = evolve_unitary(psi0, v, {1.0, T / 100.0}, T);
  const double ea = (a.amp - ref.amp).norm();
  const double eb = (b.amp - ref.amp).norm();
  CHECK(ea / eb > 3.4);
  CHECK(ea / eb < 4.6);
}

TEST_CASE("effective no-jump evolution is decayed unitary evolution") {
  const PhaseGrid g = PhaseGrid::make(64, 32.0);
  const Potential v = harmonic_potential(g, 1.0, 0.4);
  const StateVector psi0 = make_gaussian_packet(g, {1.0, 0.3, 1.2});
  const double tau = 0.8, T = 1.3;
  const StateVector eff = evolve_effective(psi0, v, {1.0, 0.005}, tau, T);
  const StateVector uni = evolve_unitary(psi0, v, {1.0, 0.005}, T);
  CHECK(eff.norm() == doctest::Approx(std::exp(-T / (2.0 * tau))).epsilon(1e-12));
  CHECK((eff.amp / eff.norm() - uni.amp).cwiseAbs().maxCoeff() < 1e-12);
  CHECK_THROWS_AS(evolve_effective(psi0, v, {1.0, 0.005}, 0.0, T), PreconditionError);
}

TEST_CASE("advance covers any duration with equal substeps") {
  const PhaseGrid g = PhaseGrid::make(64, 32.0);
  const Potential v = free_potential(g);
  const EvolutionConfig cfg{1.0, 0.01};
  Propagator prop(g, v, cfg);
  StateVector psi = make_gaussian_packet(g, {0.0, 2.0, 1.5});
  prop.advance(psi, 0.037);  // not a multiple of dt
  CHECK(mean_x(psi) == doctest::Approx(2.0 * 0.037).epsilon(1e-9));
  StateVector frozen = psi;
  prop.advance(psi, 0.0);
  CHECK((psi.amp - frozen.amp).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(prop.advance(psi, -0.1), PreconditionError);
}

TEST_CASE("classical integration follows the harmonic orbit and conserves energy") {
  const PhaseGrid g = PhaseGrid::make(64, 32.0);
  const double m = 1.3, w = 0.5;
  const Potential v = harmonic_potential(g, m, w);
  const ClassicalState s0{2.0, 0.8};
  const double T = 2.0 * (2.0 * kPi / w);
  const ClassicalState s = evolve_classical(s0, v, m, 5e-4, T);
  const double xT = s0.x * std::cos(w * T) + s0.p / (m * w) * std::sin(w * T);
  const double pT = -s0.x * m * w * std::sin(w * T) + s0.p * std::cos(w * T);
  CHECK(s.x == doctest::Approx(xT).epsilon(1e-5));
  CHECK(s.p == doctest::Approx(pT).epsilon(1e-5));
  const double e0 = classical_energy(s0, v, m), eT = classical_energy(s, v, m);
  CHECK(std::abs(eT - e0) / e0 < 1e-7);
  CHECK_THROWS_AS(evolve_classical(s0, v, m, 0.0, 1.0), PreconditionError);
}

TEST_CASE("classical coordinates are not wrapped into the box") {
  const PhaseGrid g = PhaseGrid::make(64, 32.0);
  const Potential v = free_potential(g);
  const ClassicalState s = evolve_classical({0.0, 2.0}, v, 1.0, 0.01, 20.0);
  CHECK(s.x == doctest::Approx(40.0).epsilon(1e-10));  // far past the box edge
}

TEST_CASE("energy functionals match the closed forms for a packet") {
  const PhaseGrid g = PhaseGrid::make(64, 32.0);
  const double m = 2.0, w = 0.3, x0 = 1.2, p0 = -0.7, sigma = 1.4;
  const StateVector psi = make_gaussian_packet(g, {x0, p0, sigma});
  const double hb = g.hbar;
  CHECK(kinetic_energy(psi, m) ==
        doctest::Approx((p0 * p0 + hb * hb / (4.0 * sigma * sigma)) / (2.0 * m))
            .epsilon(1e-9));
  const Potential v = harmonic_potential(g, m, w);
  CHECK(potential_energy(psi, v) ==
        doctest::Approx(0.5 * m * w * w * (x0 * x0 + sigma * sigma)).epsilon(1e-8));
  CHECK(classical_energy({x0, p0}, v, m) ==
        doctest::Approx(p0 * p0 / (2.0 * m) + 0.5 * m * w * w * x0 * x0).epsilon(1e-12));
}
