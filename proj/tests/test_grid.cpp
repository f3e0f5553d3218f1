#include <cmath>
#include <complex>

#include "doctest.h"
#include "packetsim/common.hpp"
#include "packetsim/grid.hpp"

using namespace packetsim;

TEST_CASE("grid construction rejects bad geometry") {
  CHECK_THROWS_AS(PhaseGrid::make(24, 16.0), PreconditionError);   // not a power of two
  CHECK_THROWS_AS(PhaseGrid::make(8, 16.0), PreconditionError);    // too small
  CHECK_THROWS_AS(PhaseGrid::make(32, 0.0), PreconditionError);
  CHECK_THROWS_AS(PhaseGrid::make(32, -4.0), PreconditionError);
  CHECK_THROWS_AS(PhaseGrid::make(32, 16.0, 0.0), PreconditionError);
}

TEST_CASE("position and momentum spacings tile one Planck cell per node") {
  const PhaseGrid g = PhaseGrid::make(64, 32.0);
  CHECK(g.dx == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(g.dx * g.dp * g.n == doctest::Approx(2.0 * kPi * g.hbar).epsilon(1e-14));
  CHECK(g.x(0) == doctest::Approx(-16.0));
  CHECK(g.x(g.n - 1) == doctest::Approx(16.0 - g.dx));
  CHECK(g.p_band(0) == doctest::Approx(-g.p_max()));
  CHECK(g.p_band(g.n - 1) == doctest::Approx(g.p_max() - g.dp));
  CHECK(g.p_bin(0) == 0.0);
  CHECK(g.p_bin(g.n / 2) == doctest::Approx(-g.p_max()));
  CHECK(g.p_max() == doctest::Approx(kPi * g.n / 32.0).epsilon(1e-14));

  const PhaseGrid h = PhaseGrid::make(32, 10.0, 0.5);
  CHECK(h.dx * h.dp * h.n == doctest::Approx(2.0 * kPi * 0.5).epsilon(1e-14));
}

TEST_CASE("wrap maps displacements into the minimal image") {
  const PhaseGrid g = PhaseGrid::make(64, 32.0);
  CHECK(g.wrap(5.0) == doctest::Approx(5.0));
  CHECK(g.wrap(17.0) == doctest::Approx(-15.0));
  CHECK(g.wrap(-17.0) == doctest::Approx(15.0));
  CHECK(g.wrap(16.0) == doctest::Approx(-16.0));  // half-open on the right
  CHECK(g.wrap(48.0) == doctest::Approx(-16.0));
}

TEST_CASE("gaussian packets carry the requested moments") {
  const PhaseGrid g = PhaseGrid::make(64, 32.0);
  const double x0 = 1.5, p0 = -0.8, sigma = 1.2;
  const StateVector psi = make_gaussian_packet(g, {x0, p0, sigma});
  CHECK(std::abs(psi.norm() - 1.0) < 1e-12);
  CHECK(mean_x(psi) == doctest::Approx(x0).epsilon(1e-9));
  CHECK(var_x(psi) == doctest::Approx(sigma * sigma).epsilon(1e-9));
  CHECK(mean_p(psi) == doctest::Approx(p0).epsilon(1e-9));
  CHECK(var_p(psi) ==
        doctest::Approx(g.hbar * g.hbar / (4.0 * sigma * sigma)).epsilon(1e-9));
}

TEST_CASE("overlap of two packets matches the closed form") {
  const PhaseGrid g = PhaseGrid::make(64, 32.0);
  const double sigma = 1.2;
  const StateVector a = make_gaussian_packet(g, {0.5, 0.3, sigma});
  const StateVector b = make_gaussian_packet(g, {1.3, -0.2, sigma});
  const double dx = 0.8, dp = 0.5;
  const double expect =
      std::exp(-dx * dx / (4.0 * sigma * sigma) - sigma * sigma * dp * dp);
  CHECK(std::norm(overlap(a, b)) == doctest::Approx(expect).epsilon(1e-9));
  CHECK(std::abs(overlap(a, a)) == doctest::Approx(1.0).epsilon(1e-12));

  const PhaseGrid other = PhaseGrid::make(32, 32.0);
  const StateVector c = make_gaussian_packet(other, {0.0, 0.0, sigma});
  CHECK_THROWS_AS(overlap(a, c), PreconditionError);
}

TEST_CASE("lattice translations are unitary and invertible") {
  const PhaseGrid g = PhaseGrid::make(64, 32.0);
  const StateVector psi = make_gaussian_packet(g, {1.0, 0.4, 1.5});

  StateVector moved = translate_position(psi, 3.7);
  CHECK(std::abs(moved.norm() - 1.0) < 1e-13);
  CHECK(mean_x(moved) == doctest::Approx(4.7).epsilon(1e-8));
  StateVector back = translate_position(moved, -3.7);
  CHECK((back.amp - psi.amp).cwiseAbs().maxCoeff() < 1e-12);

  StateVector kicked = translate_momentum(psi, 1.1);
  CHECK(std::abs(kicked.norm() - 1.0) < 1e-13);
  CHECK(mean_p(kicked) == doctest::Approx(1.5).epsilon(1e-8));
  StateVector unkicked = translate_momentum(kicked, -1.1);
  CHECK((unkicked.amp - psi.amp).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("packet width bounds are inclusive and enforced") {
  const PhaseGrid g = PhaseGrid::make(64, 32.0);  // dx = 0.5, L/8 = 4
  CHECK_NOTHROW(validate_packet_params(g, {0.0, 0.0, 2.0 * g.dx}));
  CHECK_NOTHROW(validate_packet_params(g, {0.0, 0.0, 4.0}));
  CHECK_THROWS_AS(validate_packet_params(g, {0.0, 0.0, 0.99}), PreconditionError);
  CHECK_THROWS_AS(validate_packet_params(g, {0.0, 0.0, 4.01}), PreconditionError);
  CHECK_THROWS_AS(make_gaussian_packet(g, {0.0, 0.0, 0.2}), PreconditionError);
}

TEST_CASE("renormalize rejects a null state") {
  StateVector z;
  z.grid = PhaseGrid::make(32, 16.0);
  z.amp = Eigen::VectorXcd::Zero(32);
  CHECK_THROWS_AS(z.renormalize(), NumericalError);
}
