#pragma once

#include <memory>

#include "packetsim/ctrw.hpp"

namespace packetsim {

// Stochastic unraveling of the collapse dynamics. Because the total jump
// rate is state independent, the jump times are exactly Exp(tau) and the
// normalized state between jumps is plain unitary evolution; the chain is
// shared with the walker ensemble, so equal (base_seed, index) reproduce a
// walker's history bit for bit.
struct Trajectory {
  std::shared_ptr<const StateVector> psi0;
  std::shared_ptr<const Potential> pot;
  EvolutionConfig cfg;
  double tau = 0.0;
  double sigma = 0.0;
  double t0 = 0.0;
  double t_final = 0.0;
  std::uint64_t base_seed = 0;
  std::uint64_t index = 0;
  std::vector<JumpEvent> jumps;
  StateVector state;  // at t_final
};

Trajectory run_trajectory(const StateVector& psi0, const Potential& pot,
                          const EvolutionConfig& cfg, double tau, double sigma,
                          double t_final, std::uint64_t seed,
                          std::uint64_t index = 0, double t0 = 0.0);

std::vector<Trajectory> run_trajectory_ensemble(const StateVector& psi0,
                                                const Potential& pot,
                                                const EvolutionConfig& cfg,
                                                double tau, double sigma, int n,
                                                double t_final, std::uint64_t base_seed,
                                                double t0 = 0.0);

// Normalized state at any time inside the run window, reconstructed from
// the jump log (unitary evolution of the last collapse packet).
StateVector state_at(const Trajectory& tr, double t);

struct EnsembleField {
  PhaseSpaceField mean;
  PhaseSpaceField stderr_field;  // per-cell standard error of the mean
};

// Mean Husimi field over trajectory states at time t. Summation is
// blockwise in index order, so the result does not depend on thread count.
EnsembleField ensemble_average(const std::vector<Trajectory>& trajectories,
                               const LatticeSpec& lattice, double t);

// General norm-threshold unraveling for a finite collapse-ket set, where
// the total jump rate does depend on the state. Jump times located by
// bisection on the monitored norm; destination pair (l, l2) drawn with
// probability proportional to rates(l, l2) |<ket_l2|psi>|^2.
struct DiscreteTrajectory {
  std::vector<double> jump_times;
  std::vector<int> dest;  // collapse target ket
  std::vector<int> src;   // monitored source ket
  StateVector state;      // normalized state at t_final
};

DiscreteTrajectory run_trajectory_discrete(const StateVector& psi0,
                                           const Potential& pot,
                                           const EvolutionConfig& cfg,
                                           const DiscreteKetChannels& channels,
                                           double t_final, std::uint64_t seed);

}  // namespace packetsim
