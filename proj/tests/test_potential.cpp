#include <cmath>
#include <cstdio>
#include <filesystem>

#include "doctest.h"
#include "packetsim/potential.hpp"

using namespace packetsim;

namespace {
const PhaseGrid kGrid = PhaseGrid::make(64, 16.0);  // dx = 0.25
}

TEST_CASE("free potential is identically zero") {
  const Potential v = free_potential(kGrid);
  CHECK(v.max_abs() == 0.0);
  CHECK(v.value_at(1.234) == 0.0);
  CHECK(v.grad_at(-3.5) == 0.0);
}

TEST_CASE("harmonic potential evaluates the analytic parabola") {
  const double m = 2.0, w = 0.7;
  const Potential v = harmonic_potential(kGrid, m, w);
  for (int j : {0, 5, 31, 63}) {
    const double x = kGrid.x(j);
    CHECK(v.values(j) == doctest::Approx(0.5 * m * w * w * x * x).epsilon(1e-12));
  }
  CHECK(v.value_at(0.37) == doctest::Approx(0.5 * m * w * w * 0.37 * 0.37).epsilon(1e-12));
  CHECK(v.grad_at(-1.1) == doctest::Approx(m * w * w * -1.1).epsilon(1e-12));
  CHECK(v.max_abs() == doctest::Approx(0.5 * m * w * w * 64.0).epsilon(1e-12));

  CHECK_THROWS_AS(harmonic_potential(kGrid, 0.0, 1.0), PreconditionError);
  CHECK_THROWS_AS(harmonic_potential(kGrid, 1.0, -0.5), PreconditionError);
}

TEST_CASE("custom potential keeps its samples and checks their count") {
  Eigen::VectorXd s(kGrid.n);
  for (int j = 0; j < kGrid.n; ++j) s(j) = std::sin(0.3 * kGrid.x(j));
  const Potential v = custom_potential(kGrid, s);
  for (int j : {0, 17, 63}) CHECK(v.value_at(kGrid.x(j)) == doctest::Approx(s(j)).epsilon(1e-12));
  CHECK_THROWS_AS(custom_potential(kGrid, Eigen::VectorXd::Zero(10)), PreconditionError);
}

TEST_CASE("potential tables round-trip exactly through save and load") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::path("potential_io_tmp");
  fs::create_directories(dir);
  const std::string path = (dir / "table.txt").string();

  const Potential v = harmonic_potential(kGrid, 1.5, 0.4);
  save_potential_table(path, v);
  const Potential r = load_potential_table(path, kGrid);
  CHECK((r.values - v.values).cwiseAbs().maxCoeff() == 0.0);  // shortest round-trip text

  const PhaseGrid other = PhaseGrid::make(64, 24.0);
  CHECK_THROWS_AS(load_potential_table(path, other), ConfigError);
  CHECK_THROWS_AS(load_potential_table((dir / "absent.txt").string(), kGrid), ConfigError);
  fs::remove_all(dir);
}

TEST_CASE("disorder is reproducible from its seed and zero-mean") {
  const Potential a = disorder_potential(kGrid, 0.5, 0.75, 42);
  const Potential b = disorder_potential(kGrid, 0.5, 0.75, 42);
  const Potential c = disorder_potential(kGrid, 0.5, 0.75, 43);
  CHECK((a.values - b.values).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.values - c.values).cwiseAbs().maxCoeff() > 0.0);
  CHECK(std::abs(a.values.mean()) < 1e-10);

  CHECK_THROWS_AS(disorder_potential(kGrid, -0.1, 0.75, 1), PreconditionError);
  CHECK_THROWS_AS(disorder_potential(kGrid, 0.5, 0.0, 1), PreconditionError);
  CHECK_THROWS_AS(disorder_potential(kGrid, 0.5, 0.75, -1.0, 1), PreconditionError);
}

TEST_CASE("disorder rms amplitude follows the ensemble convention") {
  const double strength = 0.5;
  const int n_seeds = 200;
  for (double carrier : {0.0, 3.0}) {
    double pooled = 0.0;
    for (int s = 0; s < n_seeds; ++s) {
      const Potential v =
          disorder_potential(kGrid, strength, 0.5, carrier, 1000 + s);
      pooled += v.values.squaredNorm() / kGrid.n;
    }
    pooled /= n_seeds;
    CHECK(std::abs(pooled - strength * strength) < 0.2 * strength * strength);
  }
}

TEST_CASE("carrier concentrates the spectrum: correlation flips sign at half period") {
  const double strength = 0.5, ell = 1.0, carrier = 3.0;
  const int n_seeds = 200;
  const double r = kPi / carrier;  // half the carrier period
  double with_carrier = 0.0, without = 0.0;
  for (int s = 0; s < n_seeds; ++s) {
    const Potential vc = disorder_potential(kGrid, strength, ell, carrier, 500 + s);
    const Potential v0 = disorder_potential(kGrid, strength, ell, 500 + s);
    for (int j = 0; j < kGrid.n; ++j) {
      const double x = kGrid.x(j);
      with_carrier += vc.value_at(x) * vc.value_at(x + r);
      without += v0.value_at(x) * v0.value_at(x + 0.3 * ell);
    }
  }
  with_carrier /= double(n_seeds) * kGrid.n;
  without /= double(n_seeds) * kGrid.n;
  CHECK(with_carrier < -0.2 * strength * strength);  // anticorrelated at pi/carrier
  CHECK(without > 0.5 * strength * strength);        // smooth at a fraction of ell
}
