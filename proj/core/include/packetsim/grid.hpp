#pragma once

#include <Eigen/Dense>
#include <complex>

#include "packetsim/common.hpp"

namespace packetsim {

// Periodic position grid of n points over [-L/2, L/2) together with its
// conjugate momentum grid. Spacings satisfy dx * dp * n = 2*pi*hbar exactly,
// which is what makes the discrete packet family resolve the identity.
struct PhaseGrid {
  int n = 0;
  double box_length = 0.0;
  double dx = 0.0;
  double dp = 0.0;
  double hbar = 1.0;

  static PhaseGrid make(int n_points, double box_length, double hbar = 1.0);

  double x(int j) const { return -0.5 * box_length + j * dx; }

  // Momentum carried by FFT bin k (standard wrap-around ordering).
  double p_bin(int k) const { return (k < n / 2 ? k : k - n) * dp; }

  // Momentum band b in ascending order, b = 0..n-1 maps to [-p_max, p_max).
  double p_band(int b) const { return (b - n / 2) * dp; }

  double p_max() const { return 0.5 * n * dp; }

  // Minimal-image displacement in [-L/2, L/2).
  double wrap(double d) const;

  bool same_geometry(const PhaseGrid& o) const;
};

struct StateVector {
  PhaseGrid grid;
  Eigen::VectorXcd amp;  // unit 2-norm for physical states

  double norm() const { return amp.norm(); }
  void renormalize();
};

struct PacketParams {
  double x0 = 0.0;
  double p0 = 0.0;
  double sigma = 0.0;
};

// sigma must lie in [2*dx, L/8]: narrower packets are not resolved by the
// grid, wider ones feel the periodic images.
void validate_packet_params(const PhaseGrid& grid, const PacketParams& params);

StateVector make_gaussian_packet(const PhaseGrid& grid, const PacketParams& params);

// Exact lattice translations (unitary to machine precision).
StateVector translate_position(const StateVector& psi, double y);
StateVector translate_momentum(const StateVector& psi, double k);

std::complex<double> overlap(const StateVector& a, const StateVector& b);

double mean_x(const StateVector& psi);
double var_x(const StateVector& psi);
double mean_p(const StateVector& psi);
double var_p(const StateVector& psi);

}  // namespace packetsim
