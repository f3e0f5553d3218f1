#include "packetsim/trajectory.hpp"

#include <cmath>

#include "chain.hpp"
#include "packetsim/fft.hpp"
#include "packetsim/parallel.hpp"
#include "packetsim/rng.hpp"

namespace packetsim {

Trajectory run_trajectory(const StateVector& psi0, const Potential& pot,
                          const EvolutionConfig& cfg, double tau, double sigma,
                          double t_final, std::uint64_t seed,
                          std::uint64_t index, double t0) {
  Trajectory tr;
  tr.psi0 = std::make_shared<StateVector>(psi0);
  tr.pot = std::make_shared<Potential>(pot);
  tr.cfg = cfg;
  tr.tau = tau;
  tr.sigma = sigma;
  tr.t0 = t0;
  tr.t_final = t_final;
  tr.base_seed = seed;
  tr.index = index;

  detail::ChainHooks hooks;
  hooks.final_state = &tr.state;
  Walker w = detail::run_chain(psi0, pot, cfg, tau, sigma, t0, t_final, seed,
                               index, hooks);
  tr.jumps = std::move(w.jumps);
  tr.state.renormalize();
  return tr;
}

std::vector<Trajectory> run_trajectory_ensemble(const StateVector& psi0,
                                                const Potential& pot,
                                                const EvolutionConfig& cfg,
                                                double tau, double sigma, int n,
                                                double t_final, std::uint64_t base_seed,
                                                double t0) {
  if (n <= 0) throw PreconditionError("need at least one trajectory");
  auto shared_psi0 = std::make_shared<StateVector>(psi0);
  auto shared_pot = std::make_shared<Potential>(pot);
  std::vector<Trajectory> out(static_cast<std::size_t>(n));
  parallel_for(out.size(), [&](std::size_t i) {
    Trajectory tr;
    tr.psi0 = shared_psi0;
    tr.pot = shared_pot;
    tr.cfg = cfg;
    tr.tau = tau;
    tr.sigma = sigma;
    tr.t0 = t0;
    tr.t_final = t_final;
    tr.base_seed = base_seed;
    tr.index = i;
    detail::ChainHooks hooks;
    hooks.final_state = &tr.state;
    Walker w = detail::run_chain(psi0, pot, cfg, tau, sigma, t0, t_final,
                                 base_seed, i, hooks);
    tr.jumps = std::move(w.jumps);
    tr.state.renormalize();
    out[i] = std::move(tr);
  });
  return out;
}

StateVector state_at(const Trajectory& tr, double t) {
  if (t < tr.t0 || t > tr.t_final)
    throw PreconditionError("time outside the trajectory window");
  const JumpEvent* last = nullptr;
  for (const JumpEvent& ev : tr.jumps) {
    if (ev.t > t) break;
    last = &ev;
  }
  StateVector psi;
  double since = 0.0;
  if (last) {
    psi = make_gaussian_packet(tr.psi0->grid, {last->x, last->p, tr.sigma});
    since = t - last->t;
  } else {
    psi = *tr.psi0;
    since = t - tr.t0;
  }
  psi = evolve_unitary(psi, *tr.pot, tr.cfg, since);
  psi.renormalize();
  return psi;
}

namespace {

bool same_run(const Trajectory& a, const Trajectory& b) {
  return a.psi0->grid.same_geometry(b.psi0->grid) && a.tau == b.tau &&
         a.sigma == b.sigma && a.t0 == b.t0 && a.t_final == b.t_final &&
         a.cfg.mass == b.cfg.mass && a.cfg.dt == b.cfg.dt &&
         a.pot->values == b.pot->values;
}

}  // namespace

EnsembleField ensemble_average(const std::vector<Trajectory>& trajectories,
                               const LatticeSpec& lattice, double t) {
  if (trajectories.empty()) throw PreconditionError("empty trajectory ensemble");
  for (const Trajectory& tr : trajectories)
    if (!same_run(trajectories.front(), tr))
      throw PreconditionError("trajectories come from different runs");

  struct Partial {
    Eigen::ArrayXXd sum, sumsq;
  };
  auto make = [&] {
    return Partial{Eigen::ArrayXXd::Zero(lattice.nx, lattice.np),
                   Eigen::ArrayXXd::Zero(lattice.nx, lattice.np)};
  };
  auto item = [&](std::size_t i, Partial& acc) {
    const Eigen::ArrayXXd v = husimi_field(state_at(trajectories[i], t), lattice).values;
    acc.sum += v;
    acc.sumsq += v * v;
  };
  auto partials = blockwise_partials<Partial>(trajectories.size(), 64, make, item);

  const double n = static_cast<double>(trajectories.size());
  const double hbar = trajectories.front().psi0->grid.hbar;
  EnsembleField out{PhaseSpaceField::zero(lattice, hbar),
                    PhaseSpaceField::zero(lattice, hbar)};
  Eigen::ArrayXXd sum = Eigen::ArrayXXd::Zero(lattice.nx, lattice.np);
  Eigen::ArrayXXd sumsq = sum;
  for (const Partial& p : partials) {
    sum += p.sum;
    sumsq += p.sumsq;
  }
  out.mean.values = sum / n;
  if (trajectories.size() > 1) {
    Eigen::ArrayXXd var = (sumsq - sum * sum / n) / (n - 1.0);
    out.stderr_field.values = (var.max(0.0) / n).sqrt();
  }
  return out;
}

DiscreteTrajectory run_trajectory_discrete(const StateVector& psi0,
                                           const Potential& pot,
                                           const EvolutionConfig& cfg,
                                           const DiscreteKetChannels& channels,
                                           double t_final, std::uint64_t seed) {
  const PhaseGrid& grid = psi0.grid;
  const int nk = static_cast<int>(channels.kets.size());
  if (nk == 0) throw PreconditionError("no collapse kets configured");
  if (channels.rates.rows() != nk || channels.rates.cols() != nk)
    throw PreconditionError("rate matrix shape does not match the ket count");
  if (channels.rates.minCoeff() < 0.0)
    throw PreconditionError("negative collapse rate");
  validate_evolution(grid, pot, cfg);

  // outgoing monitor rate per source ket
  Eigen::VectorXd w_out = channels.rates.colwise().sum();

  Eigen::VectorXd kinetic(grid.n);
  for (int k = 0; k < grid.n; ++k) {
    const double p = grid.p_bin(k);
    kinetic(k) = p * p / (2.0 * cfg.mass);
  }
  Eigen::VectorXcd scratch(grid.n);
  const std::complex<double> mi(0.0, -1.0);
  auto deriv = [&](const Eigen::VectorXcd& psi, Eigen::VectorXcd& out) {
    scratch = psi;
    fft_forward(scratch);
    scratch.array() *= kinetic.array();
    fft_inverse(scratch);
    scratch.array() += pot.values.array() * psi.array();
    out = (mi / grid.hbar) * scratch;
    for (int l2 = 0; l2 < nk; ++l2) {
      if (w_out(l2) == 0.0) continue;
      out -= 0.5 * w_out(l2) * channels.kets[l2].amp.dot(psi) *
             channels.kets[l2].amp;
    }
  };

  Eigen::VectorXcd k1(grid.n), k2(grid.n), k3(grid.n), k4(grid.n), tmp(grid.n);
  auto rk4 = [&](Eigen::VectorXcd& psi, double h) {
    deriv(psi, k1);
    tmp = psi + 0.5 * h * k1;
    deriv(tmp, k2);
    tmp = psi + 0.5 * h * k2;
    deriv(tmp, k3);
    tmp = psi + h * k3;
    deriv(tmp, k4);
    psi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  };

  DiscreteTrajectory tr;
  tr.state = psi0;
  Rng rng(seed);
  double t = 0.0;
  double threshold = rng.uniform_open();
  Eigen::VectorXcd pre(grid.n);
  std::vector<double> weights(static_cast<std::size_t>(nk) * nk);

  while (t < t_final) {
    const double h = std::min(cfg.dt, t_final - t);
    pre = tr.state.amp;
    rk4(tr.state.amp, h);
    if (tr.state.amp.squaredNorm() > threshold) {
      t += h;
      continue;
    }
    // bracket the crossing inside this step
    double lo = 0.0, hi = h;
    for (int iter = 0; iter < 64 && hi - lo > 1e-12 * cfg.dt; ++iter) {
      const double mid = 0.5 * (lo + hi);
      tmp = pre;
      rk4(tmp, mid);
      (tmp.squaredNorm() > threshold ? lo : hi) = mid;
    }
    tr.state.amp = pre;
    rk4(tr.state.amp, hi);
    t += hi;

    double total = 0.0;
    for (int l = 0; l < nk; ++l)
      for (int l2 = 0; l2 < nk; ++l2) {
        const double q = channels.rates(l, l2) *
                         std::norm(channels.kets[l2].amp.dot(tr.state.amp));
        weights[static_cast<std::size_t>(l) * nk + l2] = q;
        total += q;
      }
    if (!(total > 0.0)) throw NumericalError("norm hit threshold with zero jump weight");
    const int pick = rng.categorical(weights.data(), nk * nk, total);
    const int dest = pick / nk;
    tr.jump_times.push_back(t);
    tr.dest.push_back(dest);
    tr.src.push_back(pick % nk);
    tr.state = channels.kets[dest];
    threshold = rng.uniform_open();
  }
  tr.state.renormalize();
  return tr;
}

}  // namespace packetsim
