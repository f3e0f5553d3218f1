#pragma once

#include "packetsim/lindblad.hpp"

namespace packetsim {

// Quadratic phase-space localization weight S = alpha (p - k)^2 + beta (x - y)^2.
// Harmonic in disguise: spectrum hbar sqrt(alpha beta) (2n + 1), Gaussian
// ground state of width sqrt(hbar/2) (alpha/beta)^(1/4).
struct LocalizationOperator {
  double alpha = 0.0;
  double beta = 0.0;
  double y = 0.0;
  double k = 0.0;

  double ground_sigma(double hbar) const {
    return std::sqrt(0.5 * hbar) * std::pow(alpha / beta, 0.25);
  }
  double level_spacing(double hbar) const { return 2.0 * hbar * std::sqrt(alpha * beta); }
};

// Dense e^{-S} via Hermitian eigendecomposition. Rejects operators whose
// ground width the grid cannot resolve.
Eigen::MatrixXcd build_exp_S(const LocalizationOperator& op, const PhaseGrid& grid);

// Spectral data of S itself (ascending eigenvalues, matching vectors).
struct SOperatorEigs {
  Eigen::VectorXd values;
  Eigen::MatrixXcd vectors;
};
SOperatorEigs solve_S(const LocalizationOperator& op, const PhaseGrid& grid);

struct LimitReport {
  std::vector<double> alphas;
  std::vector<double> eigenvalue_ratio;    // second / top eigenvalue of e^{-S}
  std::vector<double> gaussian_fidelity;   // |<top evec | matched packet>|^2
  std::vector<double> eigenvector_drift;   // 1 - |<top evec_i | top evec_0>|
  bool ratios_strictly_decreasing = false;
};

// Sharpening limit along an alpha ladder at fixed beta/alpha: e^{-S},
// normalized, converges to the rank-one projector on a fixed Gaussian.
LimitReport limit_convergence(const std::vector<double>& alphas,
                              double beta_over_alpha, const PhaseGrid& grid);

// Rate constant that makes the continuum of e^{-S} channels trace
// preserving: the node sum M = sum w e^{-2 S_{y,k}} is (close to) a
// multiple of the identity; c = 1 / (tau * that multiple). The defect
// reports how far M is from scalar. Exactly scalar on the reference
// lattice.
struct TraceFixing {
  double c = 0.0;
  double identity_defect = 0.0;
};
TraceFixing trace_fixing_constant(const LocalizationOperator& op, const PhaseGrid& grid,
                                  double tau, const LatticeSpec& yk_lattice);

// Collapse master equation with e^{-S} channels on an explicit (y, k) node
// set, RK4 time stepping. Dense and slow by construction; intended for
// short, config-gated runs only.
DensityMatrix integrate_localization_master(const DensityMatrix& rho0,
                                            const Potential& pot,
                                            const EvolutionConfig& cfg,
                                            const LocalizationOperator& op,
                                            double tau, const LatticeSpec& yk_lattice,
                                            double duration);

struct MsdSeries {
  std::vector<double> times;
  std::vector<double> msd_quantum;
  std::vector<double> msd_classical;
  int n_quantum = 0;    // samples contributing after wrap rejection
  int n_classical = 0;
  int aborted_quantum = 0;
  int aborted_classical = 0;
  std::vector<std::uint64_t> disorder_seeds;
};

struct LocalizationConfig {
  PhaseGrid grid;
  double strength = 0.0;     // disorder rms amplitude
  double corr_length = 0.0;
  double carrier = 0.0;      // disorder spectrum center wavenumber
  double tau = 0.0;
  double sigma = 0.0;
  double p0 = 0.0;           // launch momentum
  double mass = 1.0;
  double dt = 0.0;
  double horizon = 0.0;
  int n_times = 0;
  int n_walkers = 0;         // per disorder seed
  int n_disorder_seeds = 0;
  std::uint64_t base_seed = 0;
  double edge_margin = 0.0;  // samples reaching |x| > L/2 - margin are dropped
};

// Disorder-averaged mean squared displacement of collapse walkers vs the
// classical limit of the same walk: Newtonian transport between collapses
// plus Gaussian relocations with the packet widths, launched sharp from the
// packet centroid exactly like the walkers. Quantum samples that approach
// the box edge are dropped and counted; classical partners run unwrapped.
MsdSeries localization_experiment(const LocalizationConfig& cfg);

// Least-squares slope of series(t) over the trailing window t >= t_max * frac.
double late_slope(const std::vector<double>& times, const std::vector<double>& series,
                  double frac);

}  // namespace packetsim
