#pragma once

#include "packetsim/lattice.hpp"
#include "packetsim/potential.hpp"

namespace packetsim {

struct DensityMatrix {
  PhaseGrid grid;
  Eigen::MatrixXcd m;

  static DensityMatrix pure(const StateVector& psi);
  static DensityMatrix zero(const PhaseGrid& grid);

  double trace_real() const { return m.trace().real(); }
  double hermiticity_defect() const;  // max |m - m^dagger|
  double purity() const;              // Re tr(m^2)
  double min_eigenvalue() const;      // full spectral solve, call sparingly

  // Throws NumericalError when the state drifts outside its envelope.
  void check_valid(double herm_tol = 1e-10, double trace_tol = 1e-8) const;
};

// out = H * in with H = p^2/2m + V, applied spectrally column by column.
void apply_hamiltonian(const Potential& pot, double mass,
                       const Eigen::MatrixXcd& in, Eigen::MatrixXcd& out);

}  // namespace packetsim
