#pragma once

#include <functional>
#include <variant>
#include <vector>

#include "packetsim/density.hpp"
#include "packetsim/propagate.hpp"

namespace packetsim {

// Continuum family of collapse packets over the reference lattice.
struct PhaseSpaceChannels {
  double tau = 0.0;    // mean time between collapse events
  double sigma = 0.0;  // packet width
};

// Finite set of collapse states with an explicit rate matrix; rates(l, l2)
// is the rate from source ket l2 into destination ket l.
struct DiscreteKetChannels {
  std::vector<StateVector> kets;
  Eigen::MatrixXd rates;
};

using CollapseChannelSet = std::variant<PhaseSpaceChannels, DiscreteKetChannels>;

// Collapse map over the reference packet lattice, evaluated per circular
// diagonal with FFT convolutions. Exactly trace preserving because the
// lattice resolves the identity.
class PacketChannel {
 public:
  PacketChannel(const PhaseGrid& grid, double sigma);

  // out = sum_nodes weight <phi|rho|phi> |phi><phi|
  void apply(const Eigen::MatrixXcd& rho, Eigen::MatrixXcd& out) const;

  // <phi_node|rho|phi_node> over the reference lattice.
  PhaseSpaceField husimi(const Eigen::MatrixXcd& rho) const;

  // sum_nodes weight field(node) |phi_node><phi_node|
  Eigen::MatrixXcd mixture(const PhaseSpaceField& field) const;

  const PhaseGrid& grid() const { return grid_; }
  double sigma() const { return sigma_; }
  const LatticeSpec& lattice() const { return lattice_; }

 private:
  PhaseGrid grid_;
  double sigma_ = 0.0;
  LatticeSpec lattice_;
  double c2_ = 0.0;              // squared packet normalization
  Eigen::MatrixXcd qhat_;        // column d: FFT of g((m+d)%n) g(m)
  Eigen::ArrayXXd rhat_;         // |qhat|^2
};

// drho/dt for the collapse master equation: (i/hbar)[rho, H] plus the
// dissipator of the configured channel set.
void lindblad_rhs(const DensityMatrix& rho, const Potential& pot, double mass,
                  const CollapseChannelSet& channels, Eigen::MatrixXcd& out);

struct IntegrateOptions {
  double trace_tol = 1e-6;
  int positivity_interval = 0;         // steps between spectral checks, 0 = off
  double positivity_floor = -1e-8;
  double observer_interval = 0.0;      // 0 = no callbacks
  std::function<void(double, const DensityMatrix&)> observer;
};

// Fixed-step RK4 integration over `duration` with cfg.dt steps.
DensityMatrix integrate_lindblad(const DensityMatrix& rho0, const Potential& pot,
                                 const EvolutionConfig& cfg,
                                 const CollapseChannelSet& channels,
                                 double duration, const IntegrateOptions& opts = {});

// Defect of the integrated propagation against its jump-expansion form:
// rho(t) = e^{-t/tau} U rho0 U* + integral of decayed, re-propagated
// collapse feeds. Returns max entrywise defect / max |rho(t)|.
double integral_form_residual(const DensityMatrix& rho0, const Potential& pot,
                              const EvolutionConfig& cfg,
                              const PhaseSpaceChannels& channels, double t,
                              int quad_stride = 4);

}  // namespace packetsim
