#include "packetsim/propagate.hpp"

#include <cmath>

#include "packetsim/fft.hpp"

namespace packetsim {

void validate_evolution(const PhaseGrid& grid, const Potential& pot,
                        const EvolutionConfig& cfg) {
  if (!(cfg.mass > 0.0)) throw PreconditionError("mass must be positive");
  if (!(cfg.dt > 0.0)) throw PreconditionError("time step must be positive");
  const double v_phase = pot.max_abs() * cfg.dt / grid.hbar;
  const double t_phase =
      grid.p_max() * grid.p_max() / (2.0 * cfg.mass) * cfg.dt / grid.hbar;
  if (v_phase >= 0.5 || t_phase >= 0.5)
    throw PreconditionError("time step too large for this grid and potential");
}

Propagator::Propagator(const PhaseGrid& grid, const Potential& pot,
                       const EvolutionConfig& cfg)
    : grid_(grid), cfg_(cfg), v_samples_(pot.values) {
  if (!grid.same_geometry(pot.grid))
    throw PreconditionError("potential was sampled on a different grid");
  validate_evolution(grid, pot, cfg);
  kinetic_.resize(grid.n);
  for (int k = 0; k < grid.n; ++k) {
    const double p = grid.p_bin(k);
    kinetic_(k) = p * p / (2.0 * cfg.mass);
  }
  build_tables(cfg.dt);
}

void Propagator::build_tables(double h) const {
  if (h == table_h_) return;
  const int n = grid_.n;
  half_kick_.resize(n);
  drift_.resize(n);
  for (int j = 0; j < n; ++j)
    half_kick_(j) = std::polar(1.0, -0.5 * v_samples_(j) * h / grid_.hbar);
  for (int k = 0; k < n; ++k)
    drift_(k) = std::polar(1.0, -kinetic_(k) * h / grid_.hbar);
  table_h_ = h;
}

void Propagator::step(Eigen::VectorXcd& amp) const {
  amp.array() *= half_kick_.array();
  fft_forward(amp);
  amp.array() *= drift_.array();
  fft_inverse(amp);
  amp.array() *= half_kick_.array();
}

void Propagator::advance(StateVector& psi, double duration) const {
  if (duration < 0.0) throw PreconditionError("duration must be non-negative");
  if (duration == 0.0) return;
  const long n = std::max(1L, static_cast<long>(std::ceil(duration / cfg_.dt - 1e-12)));
  build_tables(duration / static_cast<double>(n));
  for (long i = 0; i < n; ++i) step(psi.amp);
}

StateVector evolve_unitary(const StateVector& psi, const Potential& pot,
                           const EvolutionConfig& cfg, double duration) {
  Propagator prop(psi.grid, pot, cfg);
  StateVector out = psi;
  prop.advance(out, duration);
  return out;
}

StateVector evolve_effective(const StateVector& psi, const Potential& pot,
                             const EvolutionConfig& cfg, double tau, double duration) {
  if (!(tau > 0.0)) throw PreconditionError("collapse time must be positive");
  StateVector out = evolve_unitary(psi, pot, cfg, duration);
  out.amp *= std::exp(-0.5 * duration / tau);
  return out;
}

ClassicalState evolve_classical(ClassicalState s, const Potential& pot,
                                double mass, double dt, double duration) {
  if (!(mass > 0.0) || !(dt > 0.0))
    throw PreconditionError("classical integration needs positive mass and dt");
  if (duration <= 0.0) return s;
  const long n = std::max(1L, static_cast<long>(std::ceil(duration / dt - 1e-12)));
  const double h = duration / static_cast<double>(n);
  double force = -pot.grad_at(s.x);
  for (long i = 0; i < n; ++i) {
    const double p_half = s.p + 0.5 * h * force;
    s.x += h * p_half / mass;
    force = -pot.grad_at(s.x);
    s.p = p_half + 0.5 * h * force;
  }
  return s;
}

double kinetic_energy(const StateVector& psi, double mass) {
  Eigen::VectorXcd f = psi.amp;
  fft_forward(f);
  f /= std::sqrt(static_cast<double>(psi.grid.n));
  double e = 0.0;
  for (int k = 0; k < psi.grid.n; ++k) {
    const double p = psi.grid.p_bin(k);
    e += p * p / (2.0 * mass) * std::norm(f(k));
  }
  return e;
}

double potential_energy(const StateVector& psi, const Potential& pot) {
  double e = 0.0;
  for (int j = 0; j < psi.grid.n; ++j)
    e += pot.values(j) * std::norm(psi.amp(j));
  return e;
}

double classical_energy(const ClassicalState& s, const Potential& pot, double mass) {
  return s.p * s.p / (2.0 * mass) + pot.value_at(s.x);
}

}  // namespace packetsim
