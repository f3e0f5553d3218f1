#pragma once

#include <Eigen/Dense>

#include "packetsim/grid.hpp"

namespace packetsim {

// Rectangular lattice of packet centers in phase space. The reference
// lattice (x nodes = grid points, p nodes = conjugate momentum band,
// cell weight dx*dp/(2*pi*hbar) = 1/n) resolves the identity exactly.
struct LatticeSpec {
  double x0 = 0.0, dx = 0.0;
  int nx = 0;
  double p0 = 0.0, dp = 0.0;
  int np = 0;
  double sigma = 0.0;

  static LatticeSpec reference(const PhaseGrid& grid, double sigma);

  double x_node(int i) const { return x0 + i * dx; }
  double p_node(int j) const { return p0 + j * dp; }
  int cells() const { return nx * np; }

  bool is_reference_of(const PhaseGrid& grid) const;
  // True when every p node is an integer multiple of the grid momentum
  // spacing; this is what the windowed-FFT evaluation path requires.
  bool p_nodes_on_conjugate_lattice(const PhaseGrid& grid) const;

  void validate(const PhaseGrid& grid) const;
};

// Non-negative scalar field sampled on a LatticeSpec (x-major layout:
// values(i, j) belongs to node (x_i, p_j)).
struct PhaseSpaceField {
  LatticeSpec spec;
  double hbar = 1.0;
  Eigen::ArrayXXd values;

  static PhaseSpaceField zero(const LatticeSpec& spec, double hbar);

  double cell_weight() const { return spec.dx * spec.dp / (2.0 * kPi * hbar); }
  double total_mass() const { return cell_weight() * values.sum(); }
};

// |<packet(x, p, sigma)|psi>|^2, evaluated from the state samples.
double husimi_overlap(const StateVector& psi, double x, double p, double sigma);

// Husimi-type field of a pure state over a lattice. Uses the windowed-FFT
// path when the lattice momenta sit on the conjugate lattice, otherwise
// falls back to the nodewise evaluation.
PhaseSpaceField husimi_field(const StateVector& psi, const LatticeSpec& spec);

// Direct per-node evaluation, O(nx * np * n). Kept as the slow cross-check.
PhaseSpaceField husimi_field_nodewise(const StateVector& psi, const LatticeSpec& spec);

// Max-norm defect of sum_nodes weight |packet><packet| against the identity.
double identity_residual(const PhaseGrid& grid, const LatticeSpec& spec);

double field_l1_distance(const PhaseSpaceField& a, const PhaseSpaceField& b);

}  // namespace packetsim
