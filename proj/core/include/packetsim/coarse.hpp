#pragma once

#include "packetsim/ctrw.hpp"

namespace packetsim {

// Coarse phase-space cells aligned to a fine reference lattice: each cell
// is sx * sp fine nodes, so cell averages are exact node averages and the
// paired endpoint shifts of the coarse kernel land on fine nodes again.
struct CoarseSpec {
  LatticeSpec fine;
  double hbar = 1.0;
  int sx = 1, sp = 1;  // fine nodes per coarse cell per axis (1 = degenerate)
  double T = 0.0;      // time window

  double delta1() const { return 0.5 * sx * fine.dx; }
  double delta2() const { return 0.5 * sp * fine.dp; }
  double omega1() const { return sx * fine.dx; }
  double omega2() const { return sp * fine.dp; }
  int ncx() const { return fine.nx / sx; }
  int ncp() const { return fine.np / sp; }

  LatticeSpec coarse_lattice() const;

  // Degenerate one-node cells are allowed (the coarse kernel reduces to
  // the fine one); otherwise at least 4 fine nodes per axis are required.
  void validate(const PhaseGrid& grid) const;
};

// Effective coarse kernel: the fine kernel averaged over simultaneous
// shifts of both endpoints across the source cell's fine offsets. Returns
// the field over coarse destination cells for source cell (ci, cj).
PhaseSpaceField coarse_kernel_Psi(const PhaseGrid& grid, const CoarseSpec& spec,
                                  int ci, int cj, double xi, const Potential& pot,
                                  const EvolutionConfig& cfg, double tau);

// Shared shift nodes for the two kernel routes (midpoint rule, uniform
// weight 1/n per node).
struct ShiftQuadrature {
  std::vector<double> y;
  std::vector<double> k;
};
ShiftQuadrature midpoint_shift_quadrature(double delta1, int ny, double delta2, int nk);

// Route one: average the fine kernel over explicit (y, k) shifts of both
// endpoints, evaluated at coarse cell centers.
PhaseSpaceField coarse_kernel_shifted(const PhaseGrid& grid, const CoarseSpec& spec,
                                      double x_src, double p_src, double xi,
                                      const Potential& pot, const EvolutionConfig& cfg,
                                      double tau, const ShiftQuadrature& quad);

// Mixture of shifted-Hamiltonian evolutions: F-weighted average over y of
// (T_y^dag U T_y) |packet><packet| (T_y^dag U T_y)^dag. F is the hard
// uniform window of half-width delta1, discretized at explicit nodes.
struct HamiltonianFamily {
  double delta1 = 0.0;
  std::vector<double> y_nodes;  // midpoint nodes covering [-delta1, delta1]

  static HamiltonianFamily uniform(double delta1, int n_y);
};

DensityMatrix jaynes_sigma(const PhaseGrid& grid, double x_src, double p_src,
                           double sigma, double xi, const Potential& pot,
                           const EvolutionConfig& cfg, const HamiltonianFamily& family);

// Route two: the same coarse kernel assembled from the shifted-ensemble
// state, evaluating the destination packet against jaynes_sigma at each
// momentum shift. Algebraically equal to route one node by node.
PhaseSpaceField coarse_kernel_jaynes(const PhaseGrid& grid, const CoarseSpec& spec,
                                     double x_src, double p_src, double xi,
                                     const Potential& pot, const EvolutionConfig& cfg,
                                     double tau, const ShiftQuadrature& quad);

// Time series of fine fields on a common lattice (ascending times).
struct FieldHistory {
  std::vector<double> times;
  std::vector<PhaseSpaceField> fields;
};

// Macroscopic density: jump-rate density averaged over the coarse cell and
// the window [t, t + T]. The walker form histograms events; the history
// form averages stored fine fields (trapezoid in time).
PhaseSpaceField macro_density_R(const std::vector<Walker>& walkers,
                                const CoarseSpec& spec, double t);
PhaseSpaceField macro_density_R(const FieldHistory& history,
                                const CoarseSpec& spec, double t);

// Largest relative deviation, over in-cell offsets, of the windowed time
// average from the cell's macroscopic value (normalized by the peak).
// Diagnoses whether the density is homogeneous across a cell.
double homogeneity_max_deviation(const FieldHistory& history,
                                 const CoarseSpec& spec, double t);

struct RenewalCheck {
  PhaseSpaceField lhs;  // macroscopic density at the target time
  PhaseSpaceField rhs;  // coarse kernel folded with the density history + source
  double residual_l1 = 0.0;   // mass-weighted |lhs-rhs| over mass of lhs
  double residual_max = 0.0;  // max |lhs-rhs| over peak of lhs
};

// Both sides of the coarse renewal equation at target time t, using window
// bins [t0 + jT, t0 + (j+1)T) of the walker history and the coarse kernel
// at bin-midpoint elapsed times. t - t0 must be a whole number of windows
// and the walkers must extend to t + T.
RenewalCheck macro_renewal_residual(const std::vector<Walker>& walkers,
                                    const StateVector& psi0, const Potential& pot,
                                    const EvolutionConfig& cfg, double tau,
                                    const CoarseSpec& spec, double t0, double t);

struct CorrespondenceResult {
  std::vector<double> times;
  std::vector<double> err_x;  // |quantum cloud mean - classical cloud mean|
  std::vector<double> err_p;
  double max_normalized = 0.0;  // max_t hypot(err_x/x_scale, err_p/p_scale)
  bool regime_ok = true;        // packet spreading time exceeds 3 tau
};

// Walker cloud vs classical cloud from matched initial ensembles (both
// sampled from the initial Husimi field); compares cloud means at the
// given times. Runs even when the heavy-mass regime flag fails.
CorrespondenceResult liouville_correspondence_error(
    const StateVector& psi0, const Potential& pot, const EvolutionConfig& cfg,
    double tau, double sigma, int n_samples, const std::vector<double>& times,
    std::uint64_t base_seed, double x_scale, double p_scale);

}  // namespace packetsim
