#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

#include "packetsim/grid.hpp"

namespace packetsim {

// External potential sampled on the grid, with analytic (or interpolated)
// evaluation between nodes so the classical integrator sees the same
// landscape as the quantum propagator.
struct Potential {
  enum class Kind { Free, Harmonic, Custom, Disorder };

  Kind kind = Kind::Free;
  PhaseGrid grid;
  Eigen::VectorXd values;  // samples at grid.x(j)

  // harmonic parameters
  double mass = 0.0;
  double omega = 0.0;

  // disorder parameters (kept for provenance in output manifests)
  double strength = 0.0;
  double corr_length = 0.0;
  double carrier = 0.0;  // center wavenumber of the disorder spectrum
  std::uint64_t seed = 0;

  double value_at(double x) const;
  double grad_at(double x) const;
  double max_abs() const { return values.size() ? values.cwiseAbs().maxCoeff() : 0.0; }

 private:
  // disorder is a band-limited Fourier series; coefficients include the
  // spectral envelope so evaluation is a plain trig sum
  Eigen::VectorXd coef_cos_, coef_sin_;

  friend Potential disorder_potential(const PhaseGrid&, double, double, double,
                                      std::uint64_t);
};

Potential free_potential(const PhaseGrid& grid);
Potential harmonic_potential(const PhaseGrid& grid, double mass, double omega);
Potential custom_potential(const PhaseGrid& grid, const Eigen::VectorXd& samples);

// Gaussian-correlated random potential with rms amplitude `strength`
// (ensemble convention) and correlation length `corr_length`. The sample is
// a zero-mean periodic Fourier series, fully determined by the seed. The
// carrier overload centers the power spectrum at wavenumber `carrier`
// instead of 0, which concentrates backscattering at momentum transfer
// `carrier` while keeping the same rms amplitude.
Potential disorder_potential(const PhaseGrid& grid, double strength,
                             double corr_length, std::uint64_t seed);
Potential disorder_potential(const PhaseGrid& grid, double strength,
                             double corr_length, double carrier,
                             std::uint64_t seed);

// Two-column text table (x value), one row per grid node.
void save_potential_table(const std::string& path, const Potential& pot);
Potential load_potential_table(const std::string& path, const PhaseGrid& grid);

}  // namespace packetsim
