#include "packetsim/ctrw.hpp"

#include <algorithm>
#include <cmath>

#include "chain.hpp"
#include "packetsim/parallel.hpp"
#include "packetsim/rng.hpp"

namespace packetsim {

namespace detail {

Walker run_chain(const StateVector& psi0, const Potential& pot,
                 const EvolutionConfig& cfg, double tau, double sigma,
                 double t0, double t_final, std::uint64_t base_seed,
                 std::uint64_t index, const ChainHooks& hooks) {
  const PhaseGrid& grid = psi0.grid;
  const LatticeSpec lattice = LatticeSpec::reference(grid, sigma);
  Propagator prop(grid, pot, cfg);

  Walker w;
  w.index = index;
  w.t0 = t0;
  w.t_final = t_final;

  Rng rng = Rng::stream(base_seed, index);
  StateVector state = psi0;
  double t_cur = t0;

  const std::vector<double> no_samples;
  const std::vector<double>& samples = hooks.sample_times ? *hooks.sample_times : no_samples;
  std::size_t k = 0;
  while (k < samples.size() && samples[k] <= t0) {
    if (hooks.on_sample) hooks.on_sample(k, state, false);
    ++k;
  }

  for (;;) {
    const double wait = rng.exponential(tau);
    const double t_jump = t_cur + wait;
    const double seg_end = std::min(t_jump, t_final);
    while (k < samples.size() && samples[k] <= seg_end) {
      prop.advance(state, samples[k] - t_cur);
      t_cur = samples[k];
      if (hooks.on_sample) hooks.on_sample(k, state, w.collapsed);
      ++k;
    }
    if (t_jump > t_final) {
      w.final_wait = wait;
      break;
    }

    prop.advance(state, t_jump - t_cur);
    t_cur = t_jump;

    const PhaseSpaceField field = husimi_field(state, lattice);
    const int cell = rng.categorical(field.values.data(), lattice.cells(),
                                     field.values.sum());
    const int ix = cell % lattice.nx;
    const int jp = cell / lattice.nx;
    JumpEvent ev;
    ev.t = t_jump;
    ev.x = grid.wrap(lattice.x_node(ix) + (rng.uniform() - 0.5) * lattice.dx);
    ev.p = lattice.p_node(jp) + (rng.uniform() - 0.5) * lattice.dp;
    w.jumps.push_back(ev);
    w.collapsed = true;
    if (hooks.on_jump) hooks.on_jump(ev, state);

    state = make_gaussian_packet(grid, {ev.x, ev.p, sigma});
  }

  if (hooks.final_state) {
    prop.advance(state, t_final - t_cur);
    *hooks.final_state = state;
  }
  return w;
}

}  // namespace detail

namespace {

void validate_run(const WalkerRunConfig& run) {
  if (!(run.tau > 0.0)) throw PreconditionError("collapse time must be positive");
  if (!(run.sigma > 0.0)) throw PreconditionError("packet width must be positive");
  if (run.n_walkers <= 0) throw PreconditionError("need at least one walker");
  if (!(run.t_final > run.t0)) throw PreconditionError("empty time window");
  for (std::size_t i = 0; i + 1 < run.sample_times.size(); ++i)
    if (run.sample_times[i] > run.sample_times[i + 1])
      throw PreconditionError("sample times must be ascending");
  for (double s : run.sample_times)
    if (s < run.t0 || s > run.t_final)
      throw PreconditionError("sample time outside the run window");
}

}  // namespace

PhaseSpaceField kernel_psi(const PhaseGrid& grid, double x0, double p0, double xi,
                           const Potential& pot, const EvolutionConfig& cfg,
                           double tau, const LatticeSpec& lattice) {
  if (!(tau > 0.0)) throw PreconditionError("collapse time must be positive");
  if (xi < 0.0) throw PreconditionError("elapsed time must be non-negative");
  StateVector psi = make_gaussian_packet(grid, {x0, p0, lattice.sigma});
  psi = evolve_unitary(psi, pot, cfg, xi);
  PhaseSpaceField f = husimi_field(psi, lattice);
  f.values *= std::exp(-xi / tau) / tau;
  return f;
}

PhaseSpaceField source_s(const StateVector& psi0, double t0, double t,
                         const Potential& pot, const EvolutionConfig& cfg,
                         double tau, const LatticeSpec& lattice) {
  if (!(tau > 0.0)) throw PreconditionError("collapse time must be positive");
  if (t < t0) throw PreconditionError("time precedes the initial condition");
  StateVector psi = evolve_unitary(psi0, pot, cfg, t - t0);
  PhaseSpaceField f = husimi_field(psi, lattice);
  f.values *= std::exp(-(t - t0) / tau) / tau;
  return f;
}

PhaseSpaceField source_s(const DensityMatrix& rho0, double t0, double t,
                         const Potential& pot, const EvolutionConfig& cfg,
                         double tau, const LatticeSpec& lattice) {
  if (!(tau > 0.0)) throw PreconditionError("collapse time must be positive");
  if (t < t0) throw PreconditionError("time precedes the initial condition");
  if (!lattice.is_reference_of(rho0.grid))
    throw PreconditionError("mixed-state source needs the reference lattice");
  const PhaseGrid& grid = rho0.grid;
  Propagator prop(grid, pot, cfg);
  Eigen::MatrixXcd m = rho0.m;
  StateVector col{grid, Eigen::VectorXcd(grid.n)};
  for (int pass = 0; pass < 2; ++pass) {
    if (t > t0) {
      for (int c = 0; c < grid.n; ++c) {
        col.amp = m.col(c);
        prop.advance(col, t - t0);
        m.col(c) = col.amp;
      }
    }
    m.adjointInPlace();
  }
  PacketChannel chan(grid, lattice.sigma);
  PhaseSpaceField f = chan.husimi(m);
  f.values *= std::exp(-(t - t0) / tau) / tau;
  return f;
}

namespace {

double simpson_decayed_mass(const std::function<double(int)>& mass_at_node,
                            double horizon, int n_intervals, double tau) {
  if (n_intervals < 2 || n_intervals % 2 != 0)
    throw PreconditionError("Simpson rule needs an even interval count >= 2");
  const double h = horizon / n_intervals;
  // evaluate in ascending node order: callers advance a shared state
  double acc = 0.0;
  for (int j = 0; j <= n_intervals; ++j) {
    const double w = (j == 0 || j == n_intervals) ? 1.0 : (j % 2 ? 4.0 : 2.0);
    acc += w * mass_at_node(j);
  }
  // the integrand past the horizon is pure exponential decay of an
  // (already unit) mass, so close the integral analytically
  return acc * h / 3.0 + std::exp(-horizon / tau);
}

}  // namespace

double kernel_normalization(const PhaseGrid& grid, double x0, double p0,
                            const Potential& pot, const EvolutionConfig& cfg,
                            double tau, const LatticeSpec& lattice,
                            double horizon, int n_intervals) {
  StateVector psi = make_gaussian_packet(grid, {x0, p0, lattice.sigma});
  Propagator prop(grid, pot, cfg);
  const double h = horizon / n_intervals;
  double t_cur = 0.0;
  auto mass_at = [&](int j) {
    const double xi = j * h;
    prop.advance(psi, xi - t_cur);
    t_cur = xi;
    PhaseSpaceField f = husimi_field(psi, lattice);
    return f.total_mass() * std::exp(-xi / tau) / tau;
  };
  return simpson_decayed_mass(mass_at, horizon, n_intervals, tau);
}

double source_normalization(const StateVector& psi0, const Potential& pot,
                            const EvolutionConfig& cfg, double tau,
                            const LatticeSpec& lattice, double horizon,
                            int n_intervals) {
  StateVector psi = psi0;
  Propagator prop(psi0.grid, pot, cfg);
  const double h = horizon / n_intervals;
  double t_cur = 0.0;
  auto mass_at = [&](int j) {
    const double t = j * h;
    prop.advance(psi, t - t_cur);
    t_cur = t;
    PhaseSpaceField f = husimi_field(psi, lattice);
    return f.total_mass() * std::exp(-t / tau) / tau;
  };
  return simpson_decayed_mass(mass_at, horizon, n_intervals, tau);
}

WalkerEnsemble run_walkers(const StateVector& psi0, const Potential& pot,
                           const EvolutionConfig& cfg, const WalkerRunConfig& run) {
  validate_run(run);
  const LatticeSpec lattice = LatticeSpec::reference(psi0.grid, run.sigma);
  const std::size_t n = static_cast<std::size_t>(run.n_walkers);
  const std::size_t n_samples = run.sample_times.size();

  WalkerEnsemble out;
  out.sample_times = run.sample_times;
  out.walkers.resize(n);

  struct Partial {
    std::vector<Eigen::ArrayXXd> sums;
  };
  auto make = [&] {
    Partial p;
    p.sums.assign(n_samples, Eigen::ArrayXXd::Zero(lattice.nx, lattice.np));
    return p;
  };
  auto item = [&](std::size_t i, Partial& acc) {
    detail::ChainHooks hooks;
    hooks.sample_times = &run.sample_times;
    if (n_samples)
      hooks.on_sample = [&](std::size_t k, const StateVector& state, bool) {
        acc.sums[k] += husimi_field(state, lattice).values;
      };
    out.walkers[i] = detail::run_chain(psi0, pot, cfg, run.tau, run.sigma, run.t0,
                                       run.t_final, run.base_seed, i, hooks);
  };
  auto partials = blockwise_partials<Partial>(n, 256, make, item);

  out.mean_fields.reserve(n_samples);
  for (std::size_t k = 0; k < n_samples; ++k) {
    PhaseSpaceField f = PhaseSpaceField::zero(lattice, psi0.grid.hbar);
    for (const Partial& p : partials) f.values += p.sums[k];
    f.values /= static_cast<double>(n);
    out.mean_fields.push_back(std::move(f));
  }
  return out;
}

EmpiricalField empirical_r(const std::vector<Walker>& walkers,
                           const LatticeSpec& lattice, double hbar, double tau,
                           double t, double bandwidth) {
  if (!(bandwidth > 0.0)) throw PreconditionError("bandwidth must be positive");
  EmpiricalField out;
  out.field = PhaseSpaceField::zero(lattice, hbar);
  out.high_variance = bandwidth < tau / 10.0;
  const double lo = t - bandwidth;
  for (const Walker& w : walkers) {
    for (const JumpEvent& ev : w.jumps) {
      if (ev.t <= lo || ev.t > t) continue;
      int i = static_cast<int>(std::lround((ev.x - lattice.x0) / lattice.dx));
      int j = static_cast<int>(std::lround((ev.p - lattice.p0) / lattice.dp));
      i = std::clamp(i, 0, lattice.nx - 1);
      j = std::clamp(j, 0, lattice.np - 1);
      out.field.values(i, j) += 1.0;
    }
  }
  const double norm = static_cast<double>(walkers.size()) * bandwidth *
                      out.field.cell_weight();
  if (norm > 0.0) out.field.values /= norm;
  return out;
}

PhaseSpaceField ensemble_field_at(const std::vector<Walker>& walkers,
                                  const StateVector& psi0, const Potential& pot,
                                  const EvolutionConfig& cfg, double sigma,
                                  double t) {
  if (walkers.empty()) throw PreconditionError("empty walker ensemble");
  const PhaseGrid& grid = psi0.grid;
  const LatticeSpec lattice = LatticeSpec::reference(grid, sigma);
  for (const Walker& w : walkers)
    if (t < w.t0 || t > w.t_final)
      throw PreconditionError("time outside the walker run window");

  struct Partial {
    Eigen::ArrayXXd sum;
    long uncollapsed = 0;
  };
  auto make = [&] { return Partial{Eigen::ArrayXXd::Zero(lattice.nx, lattice.np), 0}; };
  auto item = [&](std::size_t i, Partial& acc) {
    const Walker& w = walkers[i];
    const JumpEvent* last = nullptr;
    for (const JumpEvent& ev : w.jumps) {
      if (ev.t > t) break;
      last = &ev;
    }
    if (!last) {
      ++acc.uncollapsed;
      return;
    }
    StateVector psi = make_gaussian_packet(grid, {last->x, last->p, sigma});
    psi = evolve_unitary(psi, pot, cfg, t - last->t);
    acc.sum += husimi_field(psi, lattice).values;
  };
  auto partials = blockwise_partials<Partial>(walkers.size(), 256, make, item);

  PhaseSpaceField f = PhaseSpaceField::zero(lattice, grid.hbar);
  long uncollapsed = 0;
  for (const Partial& p : partials) {
    f.values += p.sum;
    uncollapsed += p.uncollapsed;
  }
  if (uncollapsed > 0) {
    StateVector psi = evolve_unitary(psi0, pot, cfg, t - walkers.front().t0);
    f.values += static_cast<double>(uncollapsed) * husimi_field(psi, lattice).values;
  }
  f.values /= static_cast<double>(walkers.size());
  return f;
}

std::vector<double> waiting_times(const std::vector<Walker>& walkers) {
  std::vector<double> out;
  for (const Walker& w : walkers) {
    double prev = w.t0;
    for (const JumpEvent& ev : w.jumps) {
      out.push_back(ev.t - prev);
      prev = ev.t;
    }
    if (w.final_wait > 0.0) out.push_back(w.final_wait);
  }
  return out;
}

double ks_statistic_exponential(std::vector<double> times, double mean) {
  if (times.empty()) throw PreconditionError("no waiting times to test");
  if (!(mean > 0.0)) throw PreconditionError("mean must be positive");
  std::sort(times.begin(), times.end());
  const double n = static_cast<double>(times.size());
  double d = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double cdf = 1.0 - std::exp(-times[i] / mean);
    d = std::max(d, std::abs((static_cast<double>(i) + 1.0) / n - cdf));
    d = std::max(d, std::abs(cdf - static_cast<double>(i) / n));
  }
  return d;
}

}  // namespace packetsim
