#include <cmath>
#include <vector>

#include "doctest.h"
#include "packetsim/lindblad.hpp"

using namespace packetsim;

namespace {
const PhaseGrid kGrid = PhaseGrid::make(32, 16.0);
}

TEST_CASE("pure density matrices have unit trace, purity, and no negativity") {
  const StateVector psi = make_gaussian_packet(kGrid, {0.5, -0.3, 1.2});
  const DensityMatrix rho = DensityMatrix::pure(psi);
  CHECK(std::abs(rho.trace_real() - 1.0) < 1e-13);
  CHECK(rho.hermiticity_defect() < 1e-14);
  CHECK(rho.purity() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rho.min_eigenvalue() > -1e-12);
  CHECK_NOTHROW(rho.check_valid());
  CHECK(DensityMatrix::zero(kGrid).trace_real() == 0.0);
}

TEST_CASE("validity checks catch trace and hermiticity tampering") {
  const StateVector psi = make_gaussian_packet(kGrid, {0.0, 0.0, 1.2});
  DensityMatrix bad_trace = DensityMatrix::pure(psi);
  bad_trace.m *= 1.001;
  CHECK_THROWS_AS(bad_trace.check_valid(), NumericalError);

  DensityMatrix bad_herm = DensityMatrix::pure(psi);
  bad_herm.m(0, 1) += std::complex<double>(0.1, 0.0);
  CHECK_THROWS_AS(bad_herm.check_valid(), NumericalError);
}

TEST_CASE("hamiltonian application reproduces the packet energies") {
  const double m = 1.5, w = 0.4;
  const Potential v = harmonic_potential(kGrid, m, w);
  const StateVector psi = make_gaussian_packet(kGrid, {1.0, 0.6, 1.1});
  const DensityMatrix rho = DensityMatrix::pure(psi);
  Eigen::MatrixXcd h_rho;
  apply_hamiltonian(v, m, rho.m, h_rho);
  const double expect = kinetic_energy(psi, m) + potential_energy(psi, v);
  CHECK(h_rho.trace().real() == doctest::Approx(expect).epsilon(1e-9));
}

TEST_CASE("the packet collapse map preserves trace and hermiticity exactly") {
  const double sigma = 1.1;
  const PacketChannel chan(kGrid, sigma);
  const StateVector a = make_gaussian_packet(kGrid, {1.3, 0.7, sigma});
  StateVector cat = a;
  cat.amp += make_gaussian_packet(kGrid, {-2.0, -0.9, sigma}).amp;
  cat.renormalize();
  const DensityMatrix rho = DensityMatrix::pure(cat);

  Eigen::MatrixXcd out;
  chan.apply(rho.m, out);
  CHECK(std::abs(out.trace().real() - 1.0) < 1e-12);
  CHECK((out - out.adjoint()).cwiseAbs().maxCoeff() < 1e-12);

  // the map is exactly mixture-of-husimi over the reference lattice
  const PhaseSpaceField h = chan.husimi(rho.m);
  CHECK((chan.mixture(h) - out).cwiseAbs().maxCoeff() < 1e-12);

  // FFT circular-diagonal evaluation agrees with the nodewise fallback
  const PhaseSpaceField slow = husimi_field_nodewise(cat, chan.lattice());
  CHECK((h.values - slow.values).abs().maxCoeff() < 1e-10);
  CHECK((chan.mixture(slow) - out).cwiseAbs().maxCoeff() < 1e-10);

  // husimi of a pure state equals the state-based field
  const PhaseSpaceField direct = husimi_field(cat, chan.lattice());
  CHECK((h.values - direct.values).abs().maxCoeff() < 1e-11);
}

TEST_CASE("the master equation right-hand side is traceless and hermitian") {
  const Potential v = harmonic_potential(kGrid, 1.0, 0.3);
  StateVector cat = make_gaussian_packet(kGrid, {1.5, 0.0, 1.2});
  cat.amp += make_gaussian_packet(kGrid, {-1.5, 0.4, 1.2}).amp;
  cat.renormalize();
  const DensityMatrix rho = DensityMatrix::pure(cat);

  Eigen::MatrixXcd out;
  const CollapseChannelSet channels = PhaseSpaceChannels{0.7, 1.2};
  lindblad_rhs(rho, v, 1.0, channels, out);
  CHECK(std::abs(out.trace().real()) < 1e-11);
  CHECK(std::abs(out.trace().imag()) < 1e-11);
  CHECK((out - out.adjoint()).cwiseAbs().maxCoeff() < 1e-11);

  CHECK_THROWS_AS(lindblad_rhs(rho, v, 1.0, CollapseChannelSet(PhaseSpaceChannels{0.0, 1.2}), out),
                  PreconditionError);
}

namespace {

// Two nearly orthogonal collapse kets and their rate matrix: a feeds
// ket1 -> ket0, b feeds ket0 -> ket1. rates(dst, src).
DiscreteKetChannels two_level(double a, double b) {
  DiscreteKetChannels dk;
  dk.kets.push_back(make_gaussian_packet(kGrid, {-4.0, 0.0, 1.0}));
  dk.kets.push_back(make_gaussian_packet(kGrid, {4.0, 0.0, 1.0}));
  dk.rates = Eigen::MatrixXd::Zero(2, 2);
  dk.rates(0, 1) = a;
  dk.rates(1, 0) = b;
  return dk;
}

double population(const DensityMatrix& rho, const StateVector& ket) {
  return (ket.amp.adjoint() * rho.m * ket.amp)(0, 0).real();
}

}  // namespace

TEST_CASE("discrete-ket relaxation reproduces the two-level closed form") {
  const double a = 0.8, b = 0.3, T = 2.0;
  const DiscreteKetChannels dk = two_level(a, b);
  const Potential v = free_potential(kGrid);
  const EvolutionConfig cfg{1e6, 0.02};  // heavy mass freezes the unitary part

  Eigen::MatrixXcd out;
  const DensityMatrix rho0 = DensityMatrix::pure(dk.kets[1]);
  lindblad_rhs(rho0, v, cfg.mass, CollapseChannelSet(dk), out);
  CHECK(std::abs(out.trace().real()) < 1e-11);

  const DensityMatrix rho =
      integrate_lindblad(rho0, v, cfg, CollapseChannelSet(dk), T);
  const double p_inf = a / (a + b);
  const double expect = p_inf * (1.0 - std::exp(-(a + b) * T));
  CHECK(std::abs(population(rho, dk.kets[0]) - expect) < 2e-3);
  CHECK(std::abs(rho.trace_real() - 1.0) < 1e-10);
  CHECK(rho.hermiticity_defect() < 1e-10);

  DiscreteKetChannels bad = dk;
  bad.rates = Eigen::MatrixXd::Zero(3, 3);
  CHECK_THROWS_AS(lindblad_rhs(rho0, v, cfg.mass, CollapseChannelSet(bad), out),
                  PreconditionError);
}

TEST_CASE("integration conserves trace, loses purity, and reports to observers") {
  const Potential v = harmonic_potential(kGrid, 1.0, 0.3);
  const StateVector psi = make_gaussian_packet(kGrid, {1.0, 0.0, 1.2});
  const DensityMatrix rho0 = DensityMatrix::pure(psi);
  const CollapseChannelSet channels = PhaseSpaceChannels{1.0, 1.2};
  const EvolutionConfig cfg{1.0, 0.01};

  std::vector<double> seen;
  IntegrateOptions opts;
  opts.positivity_interval = 10;
  opts.observer_interval = 0.05;
  opts.observer = [&](double t, const DensityMatrix&) { seen.push_back(t); };
  const DensityMatrix rho = integrate_lindblad(rho0, v, cfg, channels, 0.2, opts);

  CHECK(std::abs(rho.trace_real() - 1.0) < 1e-8);
  CHECK(rho.hermiticity_defect() < 1e-10);
  CHECK(rho.purity() < 1.0);
  CHECK(rho.purity() > 0.3);
  REQUIRE(seen.size() == 5);  // t = 0, 0.05, 0.10, 0.15, 0.20
  CHECK(seen.front() == 0.0);
  CHECK(seen.back() == doctest::Approx(0.2).epsilon(1e-9));

  // zero duration is the identity map
  const DensityMatrix same = integrate_lindblad(rho0, v, cfg, channels, 0.0);
  CHECK((same.m - rho0.m).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(integrate_lindblad(rho0, v, cfg, channels, -1.0), PreconditionError);

  IntegrateOptions strict;
  strict.trace_tol = 1e-18;  // unreachable: any real step trips it
  CHECK_THROWS_AS(integrate_lindblad(rho0, v, cfg, channels, 0.2, strict),
                  NumericalError);
}

TEST_CASE("the integrated state matches its jump-expansion integral form") {
  const Potential v = harmonic_potential(kGrid, 1.0, 0.3);
  const StateVector psi = make_gaussian_packet(kGrid, {1.2, 0.4, 1.3});
  const DensityMatrix rho0 = DensityMatrix::pure(psi);
  const PhaseSpaceChannels channels{1.0, 1.3};
  const double res = integral_form_residual(rho0, v, {1.0, 0.005}, channels, 0.4, 2);
  CHECK(res < 1e-3);
  CHECK_THROWS_AS(integral_form_residual(rho0, v, {1.0, 0.005}, channels, -0.1, 2),
                  PreconditionError);
  CHECK_THROWS_AS(integral_form_residual(rho0, v, {1.0, 0.005}, channels, 0.4, 0),
                  PreconditionError);
}
