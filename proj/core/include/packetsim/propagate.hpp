#pragma once

#include "packetsim/potential.hpp"

namespace packetsim {

struct EvolutionConfig {
  double mass = 1.0;
  double dt = 0.0;
};

// Rejects steps whose potential or kinetic phase advance per step reaches
// the aliasing regime (either phase >= 0.5 rad at the extreme node).
void validate_evolution(const PhaseGrid& grid, const Potential& pot,
                        const EvolutionConfig& cfg);

// Second-order split-operator propagator (half potential kick, full kinetic
// drift in momentum space, half kick). Unitary to machine precision.
class Propagator {
 public:
  Propagator(const PhaseGrid& grid, const Potential& pot, const EvolutionConfig& cfg);

  void step(Eigen::VectorXcd& amp) const;  // advance by cfg.dt
  // n equal substeps covering `duration`, n = ceil(duration / dt).
  void advance(StateVector& psi, double duration) const;

  const PhaseGrid& grid() const { return grid_; }
  const EvolutionConfig& config() const { return cfg_; }

 private:
  void build_tables(double h) const;

  PhaseGrid grid_;
  EvolutionConfig cfg_;
  Eigen::VectorXd v_samples_;
  Eigen::VectorXd kinetic_;  // p^2 / 2m per FFT bin
  mutable double table_h_ = -1.0;
  mutable Eigen::VectorXcd half_kick_, drift_;
};

StateVector evolve_unitary(const StateVector& psi, const Potential& pot,
                           const EvolutionConfig& cfg, double duration);

// Evolution under the no-jump effective generator. The decay is state
// independent, so this is the unitary evolution scaled by exp(-t / (2 tau)).
// The result is intentionally not normalized.
StateVector evolve_effective(const StateVector& psi, const Potential& pot,
                             const EvolutionConfig& cfg, double tau, double duration);

struct ClassicalState {
  double x = 0.0;
  double p = 0.0;
};

// Velocity Verlet on the same landscape; x is not wrapped into the box.
ClassicalState evolve_classical(ClassicalState s, const Potential& pot,
                                double mass, double dt, double duration);

double kinetic_energy(const StateVector& psi, double mass);
double potential_energy(const StateVector& psi, const Potential& pot);
double classical_energy(const ClassicalState& s, const Potential& pot, double mass);

}  // namespace packetsim
