#include "packetsim/density.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>

#include "packetsim/fft.hpp"

namespace packetsim {

DensityMatrix DensityMatrix::pure(const StateVector& psi) {
  DensityMatrix rho;
  rho.grid = psi.grid;
  rho.m = psi.amp * psi.amp.adjoint();
  return rho;
}

DensityMatrix DensityMatrix::zero(const PhaseGrid& grid) {
  DensityMatrix rho;
  rho.grid = grid;
  rho.m = Eigen::MatrixXcd::Zero(grid.n, grid.n);
  return rho;
}

double DensityMatrix::hermiticity_defect() const {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix::purity() const { return (m * m).trace().real(); }

double DensityMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(
      0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

void DensityMatrix::check_valid(double herm_tol, double trace_tol) const {
  const double h = hermiticity_defect();
  if (h > herm_tol)
    throw NumericalError("density matrix lost hermiticity, defect " + std::to_string(h));
  const double t = std::abs(trace_real() - 1.0);
  if (t > trace_tol)
    throw NumericalError("density matrix trace drifted by " + std::to_string(t));
}

void apply_hamiltonian(const Potential& pot, double mass,
                       const Eigen::MatrixXcd& in, Eigen::MatrixXcd& out) {
  const PhaseGrid& grid = pot.grid;
  const int n = grid.n;
  out.resize(n, n);
  Eigen::VectorXd kinetic(n);
  for (int k = 0; k < n; ++k) {
    const double p = grid.p_bin(k);
    kinetic(k) = p * p / (2.0 * mass);
  }
  Eigen::VectorXcd col(n);
  for (int c = 0; c < n; ++c) {
    col = in.col(c);
    fft_forward(col);
    col.array() *= kinetic.array();
    fft_inverse(col);
    out.col(c) = col + (pot.values.array() * in.col(c).array()).matrix();
  }
}

}  // namespace packetsim
