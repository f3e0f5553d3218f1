#include <cmath>

#include "doctest.h"
#include "packetsim/lattice.hpp"

using namespace packetsim;

namespace {
const PhaseGrid kGrid = PhaseGrid::make(32, 16.0);  // dx = 0.5, p_max = 2 pi
}

TEST_CASE("reference lattice geometry matches the grid") {
  const LatticeSpec s = LatticeSpec::reference(kGrid, 1.0);
  CHECK(s.is_reference_of(kGrid));
  CHECK(s.p_nodes_on_conjugate_lattice(kGrid));
  CHECK(s.cells() == 32 * 32);
  CHECK(s.x_node(0) == doctest::Approx(-8.0));
  CHECK(s.p_node(0) == doctest::Approx(-kGrid.p_max()));
  CHECK(s.x_node(s.nx - 1) == doctest::Approx(8.0 - kGrid.dx));
}

TEST_CASE("lattice validation rejects empty or unresolvable specs") {
  LatticeSpec s = LatticeSpec::reference(kGrid, 1.0);
  s.nx = 0;
  CHECK_THROWS_AS(s.validate(kGrid), PreconditionError);
  LatticeSpec w = LatticeSpec::reference(kGrid, 1.0);
  w.sigma = 0.1;  // narrower than the grid can resolve
  CHECK_THROWS_AS(w.validate(kGrid), PreconditionError);
}

TEST_CASE("the reference packet family resolves the identity") {
  for (double sigma : {1.0, 1.7}) {
    const LatticeSpec s = LatticeSpec::reference(kGrid, sigma);
    CHECK(identity_residual(kGrid, s) < 1e-12);
  }
}

TEST_CASE("an undersampled momentum band does not resolve the identity") {
  LatticeSpec s = LatticeSpec::reference(kGrid, 1.7);
  s.np /= 4;
  s.dp *= 4.0;  // same span, a quarter of the nodes
  CHECK(identity_residual(kGrid, s) > 0.01);
}

TEST_CASE("husimi overlap of two packets matches the closed form") {
  const double sigma = 1.3;
  const StateVector psi = make_gaussian_packet(kGrid, {0.7, 0.9, sigma});
  for (const auto& [x, p] : {std::pair{1.2, 0.5}, std::pair{-0.4, 1.6}}) {
    const double dx = x - 0.7, dp = p - 0.9;
    const double expect = std::exp(-dx * dx / (4.0 * sigma * sigma) -
                                   sigma * sigma * dp * dp / (kGrid.hbar * kGrid.hbar));
    CHECK(husimi_overlap(psi, x, p, sigma) == doctest::Approx(expect).epsilon(1e-9));
  }
}

TEST_CASE("windowed-FFT and nodewise husimi evaluations agree") {
  const LatticeSpec s = LatticeSpec::reference(kGrid, 1.1);
  const StateVector psi = make_gaussian_packet(kGrid, {1.3, 0.7, 1.1});
  const PhaseSpaceField fast = husimi_field(psi, s);
  const PhaseSpaceField slow = husimi_field_nodewise(psi, s);
  CHECK((fast.values - slow.values).abs().maxCoeff() < 1e-10);
  CHECK(field_l1_distance(fast, slow) < 1e-10);
}

TEST_CASE("husimi mass of any normalized state is one on the reference lattice") {
  const LatticeSpec s = LatticeSpec::reference(kGrid, 1.2);
  const StateVector packet = make_gaussian_packet(kGrid, {0.0, 0.5, 1.2});
  CHECK(husimi_field(packet, s).total_mass() == doctest::Approx(1.0).epsilon(1e-10));

  StateVector cat = packet;
  cat.amp += make_gaussian_packet(kGrid, {-3.0, -0.5, 1.2}).amp;
  cat.renormalize();
  CHECK(husimi_field(cat, s).total_mass() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("field geometry helpers") {
  const LatticeSpec s = LatticeSpec::reference(kGrid, 1.0);
  const PhaseSpaceField f = PhaseSpaceField::zero(s, kGrid.hbar);
  CHECK(f.values.rows() == s.nx);
  CHECK(f.values.cols() == s.np);
  CHECK(f.cell_weight() == doctest::Approx(1.0 / kGrid.n).epsilon(1e-14));
  CHECK(f.total_mass() == 0.0);
}

TEST_CASE("field distance demands a common lattice") {
  const LatticeSpec s = LatticeSpec::reference(kGrid, 1.0);
  PhaseSpaceField a = PhaseSpaceField::zero(s, kGrid.hbar);
  LatticeSpec other = s;
  other.nx /= 2;
  PhaseSpaceField b = PhaseSpaceField::zero(other, kGrid.hbar);
  CHECK_THROWS_AS(field_l1_distance(a, b), PreconditionError);
}
