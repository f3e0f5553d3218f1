#pragma once

#include <cstdint>
#include <vector>

#include "packetsim/lindblad.hpp"

namespace packetsim {

struct JumpEvent {
  double t = 0.0;
  double x = 0.0;
  double p = 0.0;
};

// One realization of the packet walk. Jump positions are continuous
// (lattice node plus in-cell jitter); replay from (base_seed, index) is
// bit-identical.
struct Walker {
  std::uint64_t index = 0;
  bool collapsed = false;     // false: no jump happened before t_final
  std::vector<JumpEvent> jumps;
  double t0 = 0.0;
  double t_final = 0.0;
  // The first waiting-time draw that overshoots t_final. Keeping it makes
  // the pooled waiting-time sample free of right-truncation bias (dropping
  // the overshooting draw under-represents long waits).
  double final_wait = 0.0;
};

struct WalkerRunConfig {
  double tau = 0.0;
  double sigma = 0.0;
  double t0 = 0.0;
  double t_final = 0.0;
  int n_walkers = 0;
  std::uint64_t base_seed = 0;
  // Husimi fields of the walker ensemble are accumulated at these times
  // during the run (ascending). Cheap compared to a separate replay pass.
  std::vector<double> sample_times;
};

struct WalkerEnsemble {
  std::vector<Walker> walkers;
  std::vector<double> sample_times;
  std::vector<PhaseSpaceField> mean_fields;  // one per sample time
};

// Memory kernel over the reference lattice: propagate the packet at
// `origin` for time xi, Husimi transform, times the decayed jump rate.
PhaseSpaceField kernel_psi(const PhaseGrid& grid, double x0, double p0, double xi,
                           const Potential& pot, const EvolutionConfig& cfg,
                           double tau, const LatticeSpec& lattice);

// Source field: survival-decayed Husimi of the freely propagated initial
// condition.
PhaseSpaceField source_s(const StateVector& psi0, double t0, double t,
                         const Potential& pot, const EvolutionConfig& cfg,
                         double tau, const LatticeSpec& lattice);
PhaseSpaceField source_s(const DensityMatrix& rho0, double t0, double t,
                         const Potential& pot, const EvolutionConfig& cfg,
                         double tau, const LatticeSpec& lattice);

// Joint quadrature of the kernel over destination and elapsed time:
// Simpson rule on [0, horizon] plus the analytic exponential tail estimate.
// Equals 1 up to discretization when horizon >= 8 tau.
double kernel_normalization(const PhaseGrid& grid, double x0, double p0,
                            const Potential& pot, const EvolutionConfig& cfg,
                            double tau, const LatticeSpec& lattice,
                            double horizon, int n_intervals);
double source_normalization(const StateVector& psi0, const Potential& pot,
                            const EvolutionConfig& cfg, double tau,
                            const LatticeSpec& lattice, double horizon,
                            int n_intervals);

// Monte Carlo walker ensemble of the renewal process: waiting times are
// Exp(tau); destinations are drawn from the Husimi field of the unitarily
// evolved current packet. Walkers run on the reference lattice so the
// destination distribution is exactly normalized.
WalkerEnsemble run_walkers(const StateVector& psi0, const Potential& pot,
                           const EvolutionConfig& cfg, const WalkerRunConfig& run);

// Jump-event rate density estimated from events in [t - bandwidth, t].
struct EmpiricalField {
  PhaseSpaceField field;
  bool high_variance = false;  // bandwidth below tau/10
};
EmpiricalField empirical_r(const std::vector<Walker>& walkers,
                           const LatticeSpec& lattice, double hbar, double tau,
                           double t, double bandwidth);

// Mean Husimi field of the ensemble's reconstructed states at time t
// (uncollapsed walkers contribute the propagated initial state). This is
// the unbiased estimator of the master equation's own Husimi field.
PhaseSpaceField ensemble_field_at(const std::vector<Walker>& walkers,
                                  const StateVector& psi0, const Potential& pot,
                                  const EvolutionConfig& cfg, double sigma,
                                  double t);

// All waiting-time draws of the ensemble: inter-jump gaps plus each
// walker's final overshooting draw, so the sample is unbiased.
std::vector<double> waiting_times(const std::vector<Walker>& walkers);

// Kolmogorov-Smirnov statistic against the exponential law with the given
// mean. The 1% critical value is about 1.628/sqrt(n).
double ks_statistic_exponential(std::vector<double> times, double mean);

}  // namespace packetsim
