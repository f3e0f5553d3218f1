#include "packetsim/lattice.hpp"

#include <cmath>
#include <vector>

#include "packetsim/fft.hpp"

namespace packetsim {

LatticeSpec LatticeSpec::reference(const PhaseGrid& grid, double sigma) {
  LatticeSpec s;
  s.x0 = grid.x(0);
  s.dx = grid.dx;
  s.nx = grid.n;
  s.p0 = -grid.p_max();
  s.dp = grid.dp;
  s.np = grid.n;
  s.sigma = sigma;
  s.validate(grid);
  return s;
}

bool LatticeSpec::is_reference_of(const PhaseGrid& grid) const {
  auto close = [](double a, double b, double scale) {
    return std::abs(a - b) <= 1e-12 * scale;
  };
  return nx == grid.n && np == grid.n &&
         close(x0, grid.x(0), grid.box_length) &&
         close(dx, grid.dx, grid.dx) &&
         close(p0, -grid.p_max(), grid.p_max()) &&
         close(dp, grid.dp, grid.dp);
}

bool LatticeSpec::p_nodes_on_conjugate_lattice(const PhaseGrid& grid) const {
  for (int j = 0; j < np; ++j) {
    const double m = p_node(j) / grid.dp;
    if (std::abs(m - std::round(m)) > 1e-9) return false;
  }
  return true;
}

void LatticeSpec::validate(const PhaseGrid& grid) const {
  if (nx < 1 || np < 1) throw PreconditionError("lattice needs at least one node");
  if (!(dx > 0.0) && nx > 1) throw PreconditionError("lattice dx must be positive");
  if (!(dp > 0.0) && np > 1) throw PreconditionError("lattice dp must be positive");
  PacketParams probe{x0, p0, sigma};
  validate_packet_params(grid, probe);
}

PhaseSpaceField PhaseSpaceField::zero(const LatticeSpec& spec, double hbar) {
  PhaseSpaceField f;
  f.spec = spec;
  f.hbar = hbar;
  f.values = Eigen::ArrayXXd::Zero(spec.nx, spec.np);
  return f;
}

double husimi_overlap(const StateVector& psi, double x, double p, double sigma) {
  const StateVector phi = make_gaussian_packet(psi.grid, {x, p, sigma});
  return std::norm(overlap(phi, psi));
}

namespace {

// Envelope of a packet centered at x_c, sampled on the grid, plus its
// normalization constant.
void packet_envelope(const PhaseGrid& grid, double x_c, double sigma,
                     Eigen::ArrayXd& env, double& inv_norm) {
  env.resize(grid.n);
  const double inv4s2 = 1.0 / (4.0 * sigma * sigma);
  double norm2 = 0.0;
  for (int j = 0; j < grid.n; ++j) {
    const double w = grid.wrap(grid.x(j) - x_c);
    env(j) = std::exp(-w * w * inv4s2);
    norm2 += env(j) * env(j);
  }
  inv_norm = 1.0 / std::sqrt(norm2);
}

PhaseSpaceField husimi_field_windowed(const StateVector& psi, const LatticeSpec& spec) {
  const PhaseGrid& grid = psi.grid;
  PhaseSpaceField out = PhaseSpaceField::zero(spec, grid.hbar);

  std::vector<int> bins(spec.np);
  for (int j = 0; j < spec.np; ++j) {
    const int m = static_cast<int>(std::llround(spec.p_node(j) / grid.dp));
    bins[j] = ((m % grid.n) + grid.n) % grid.n;
  }

  Eigen::ArrayXd env;
  Eigen::VectorXcd windowed(grid.n);
  double inv_norm;
  for (int i = 0; i < spec.nx; ++i) {
    packet_envelope(grid, spec.x_node(i), spec.sigma, env, inv_norm);
    windowed = (env * psi.amp.array()).matrix();
    fft_forward(windowed);
    for (int j = 0; j < spec.np; ++j) {
      out.values(i, j) = std::norm(windowed(bins[j])) * inv_norm * inv_norm;
    }
  }
  return out;
}

}  // namespace

PhaseSpaceField husimi_field(const StateVector& psi, const LatticeSpec& spec) {
  spec.validate(psi.grid);
  if (spec.p_nodes_on_conjugate_lattice(psi.grid))
    return husimi_field_windowed(psi, spec);
  return husimi_field_nodewise(psi, spec);
}

PhaseSpaceField husimi_field_nodewise(const StateVector& psi, const LatticeSpec& spec) {
  spec.validate(psi.grid);
  const PhaseGrid& grid = psi.grid;
  PhaseSpaceField out = PhaseSpaceField::zero(spec, grid.hbar);
  for (int i = 0; i < spec.nx; ++i) {
    for (int j = 0; j < spec.np; ++j) {
      out.values(i, j) = husimi_overlap(psi, spec.x_node(i), spec.p_node(j), spec.sigma);
    }
  }
  return out;
}

double identity_residual(const PhaseGrid& grid, const LatticeSpec& spec) {
  spec.validate(grid);
  const double weight = spec.dx * spec.dp / (2.0 * kPi * grid.hbar);
  Eigen::MatrixXcd D = Eigen::MatrixXcd::Zero(grid.n, grid.n);
  Eigen::ArrayXd env;
  Eigen::VectorXcd phi(grid.n);
  double inv_norm;
  for (int i = 0; i < spec.nx; ++i) {
    packet_envelope(grid, spec.x_node(i), spec.sigma, env, inv_norm);
    for (int j = 0; j < spec.np; ++j) {
      const double p = spec.p_node(j);
      for (int l = 0; l < grid.n; ++l) {
        const double w = grid.wrap(grid.x(l) - spec.x_node(i));
        phi(l) = std::polar(env(l) * inv_norm, p * w / grid.hbar);
      }
      D.selfadjointView<Eigen::Lower>().rankUpdate(phi, weight);
    }
  }
  D = D.selfadjointView<Eigen::Lower>();
  D -= Eigen::MatrixXcd::Identity(grid.n, grid.n);
  return D.cwiseAbs().maxCoeff();
}

double field_l1_distance(const PhaseSpaceField& a, const PhaseSpaceField& b) {
  if (a.spec.nx != b.spec.nx || a.spec.np != b.spec.np)
    throw PreconditionError("fields live on different lattices");
  return a.cell_weight() * (a.values - b.values).abs().sum();
}

}  // namespace packetsim
