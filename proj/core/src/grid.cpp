#include "packetsim/grid.hpp"

#include <cmath>

#include "packetsim/fft.hpp"

namespace packetsim {

PhaseGrid PhaseGrid::make(int n_points, double box_length, double hbar) {
  if (n_points < 16 || (n_points & (n_points - 1)) != 0)
    throw PreconditionError("grid size must be a power of two, at least 16");
  if (!(box_length > 0.0)) throw PreconditionError("box length must be positive");
  if (!(hbar > 0.0)) throw PreconditionError("hbar must be positive");
  PhaseGrid g;
  g.n = n_points;
  g.box_length = box_length;
  g.dx = box_length / n_points;
  g.dp = 2.0 * kPi * hbar / box_length;
  g.hbar = hbar;
  return g;
}

double PhaseGrid::wrap(double d) const {
  const double L = box_length;
  d = std::fmod(d + 0.5 * L, L);
  if (d < 0.0) d += L;
  return d - 0.5 * L;
}

bool PhaseGrid::same_geometry(const PhaseGrid& o) const {
  return n == o.n && box_length == o.box_length && hbar == o.hbar;
}

void StateVector::renormalize() {
  const double nrm = amp.norm();
  if (nrm <= 0.0) throw NumericalError("cannot renormalize a null state");
  amp /= nrm;
}

void validate_packet_params(const PhaseGrid& grid, const PacketParams& params) {
  const double lo = 2.0 * grid.dx;
  const double hi = grid.box_length / 8.0;
  if (!(params.sigma >= lo && params.sigma <= hi))
    throw PreconditionError("packet width must lie in [2*dx, L/8]");
}

StateVector make_gaussian_packet(const PhaseGrid& grid, const PacketParams& params) {
  validate_packet_params(grid, params);
  StateVector psi;
  psi.grid = grid;
  psi.amp.resize(grid.n);
  const double inv4s2 = 1.0 / (4.0 * params.sigma * params.sigma);
  double norm2 = 0.0;
  for (int j = 0; j < grid.n; ++j) {
    const double w = grid.wrap(grid.x(j) - params.x0);
    const double env = std::exp(-w * w * inv4s2);
    const double phase = params.p0 * w / grid.hbar;
    psi.amp(j) = std::polar(env, phase);
    norm2 += env * env;
  }
  psi.amp /= std::sqrt(norm2);
  return psi;
}

StateVector translate_position(const StateVector& psi, double y) {
  StateVector out = psi;
  fft_forward(out.amp);
  for (int k = 0; k < out.grid.n; ++k) {
    const double phase = -out.grid.p_bin(k) * y / out.grid.hbar;
    out.amp(k) *= std::polar(1.0, phase);
  }
  fft_inverse(out.amp);
  return out;
}

StateVector translate_momentum(const StateVector& psi, double k) {
  StateVector out = psi;
  for (int j = 0; j < out.grid.n; ++j) {
    out.amp(j) *= std::polar(1.0, k * out.grid.x(j) / out.grid.hbar);
  }
  return out;
}

std::complex<double> overlap(const StateVector& a, const StateVector& b) {
  if (!a.grid.same_geometry(b.grid))
    throw PreconditionError("overlap requires states on the same grid");
  return a.amp.dot(b.amp);  // conjugates the left argument
}

double mean_x(const StateVector& psi) {
  double m = 0.0;
  for (int j = 0; j < psi.grid.n; ++j)
    m += psi.grid.x(j) * std::norm(psi.amp(j));
  return m;
}

double var_x(const StateVector& psi) {
  const double m = mean_x(psi);
  double v = 0.0;
  for (int j = 0; j < psi.grid.n; ++j) {
    const double d = psi.grid.x(j) - m;
    v += d * d * std::norm(psi.amp(j));
  }
  return v;
}

namespace {
Eigen::VectorXcd momentum_amplitudes(const StateVector& psi) {
  Eigen::VectorXcd f = psi.amp;
  fft_forward(f);
  f /= std::sqrt(static_cast<double>(psi.grid.n));
  return f;
}
}  // namespace

double mean_p(const StateVector& psi) {
  const Eigen::VectorXcd f = momentum_amplitudes(psi);
  double m = 0.0;
  for (int k = 0; k < psi.grid.n; ++k) m += psi.grid.p_bin(k) * std::norm(f(k));
  return m;
}

double var_p(const StateVector& psi) {
  const Eigen::VectorXcd f = momentum_amplitudes(psi);
  double m = 0.0, m2 = 0.0;
  for (int k = 0; k < psi.grid.n; ++k) {
    const double w = std::norm(f(k));
    m += psi.grid.p_bin(k) * w;
    m2 += psi.grid.p_bin(k) * psi.grid.p_bin(k) * w;
  }
  return m2 - m * m;
}

}  // namespace packetsim
