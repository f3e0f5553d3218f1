#include "packetsim/limits.hpp"

#include <algorithm>
#include <cmath>

#include "chain.hpp"
#include "packetsim/fft.hpp"
#include "packetsim/parallel.hpp"
#include "packetsim/rng.hpp"

namespace packetsim {

namespace {

void check_resolved(const LocalizationOperator& op, const PhaseGrid& grid) {
  if (!(op.alpha > 0.0) || !(op.beta > 0.0))
    throw PreconditionError("localization scales must be positive");
  validate_packet_params(grid, {op.y, op.k, op.ground_sigma(grid.hbar)});
}

// S = alpha (P - k)^2 + beta (X - y)^2 assembled densely; P is the circulant
// spectral momentum operator.
Eigen::MatrixXcd assemble_S(const LocalizationOperator& op, const PhaseGrid& grid) {
  const int n = grid.n;
  Eigen::VectorXcd stencil(n);
  for (int b = 0; b < n; ++b) stencil(b) = grid.p_bin(b) - op.k;
  fft_inverse(stencil);  // stencil(m) = (1/n) sum_b (p_b - k) e^{+2 pi i b m / n}

  Eigen::MatrixXcd pk(n, n);
  for (int j = 0; j < n; ++j)
    for (int l = 0; l < n; ++l) pk(j, l) = stencil(((j - l) % n + n) % n);

  Eigen::MatrixXcd s = op.alpha * pk * pk;
  for (int j = 0; j < n; ++j) {
    const double d = grid.x(j) - op.y;
    s(j, j) += op.beta * d * d;
  }
  return s;
}

SOperatorEigs solve_S_impl(const LocalizationOperator& op, const PhaseGrid& grid) {
  check_resolved(op, grid);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(assemble_S(op, grid));
  if (es.info() != Eigen::Success) throw NumericalError("eigensolver failed on S");
  return {es.eigenvalues(), es.eigenvectors()};
}

}  // namespace

SOperatorEigs solve_S(const LocalizationOperator& op, const PhaseGrid& grid) {
  return solve_S_impl(op, grid);
}

Eigen::MatrixXcd build_exp_S(const LocalizationOperator& op, const PhaseGrid& grid) {
  const SOperatorEigs eig = solve_S_impl(op, grid);
  return eig.vectors *
         (-eig.values.array()).exp().matrix().asDiagonal() *
         eig.vectors.adjoint();
}

LimitReport limit_convergence(const std::vector<double>& alphas,
                              double beta_over_alpha, const PhaseGrid& grid) {
  if (alphas.size() < 2) throw PreconditionError("ladder needs >= 2 rungs");
  for (std::size_t i = 0; i + 1 < alphas.size(); ++i)
    if (!(alphas[i] < alphas[i + 1]))
      throw PreconditionError("ladder must be strictly increasing");
  if (!(beta_over_alpha > 0.0)) throw PreconditionError("beta/alpha must be positive");

  LimitReport rep;
  rep.alphas = alphas;
  Eigen::VectorXcd first_ground;
  for (double alpha : alphas) {
    LocalizationOperator op{alpha, alpha * beta_over_alpha, 0.0, 0.0};
    const SOperatorEigs eig = solve_S_impl(op, grid);
    rep.eigenvalue_ratio.push_back(std::exp(eig.values(0) - eig.values(1)));

    const Eigen::VectorXcd ground = eig.vectors.col(0);
    const StateVector packet =
        make_gaussian_packet(grid, {0.0, 0.0, op.ground_sigma(grid.hbar)});
    rep.gaussian_fidelity.push_back(std::norm(packet.amp.dot(ground)));
    if (first_ground.size() == 0) first_ground = ground;
    rep.eigenvector_drift.push_back(1.0 - std::abs(first_ground.dot(ground)));
  }
  rep.ratios_strictly_decreasing = true;
  for (std::size_t i = 0; i + 1 < rep.eigenvalue_ratio.size(); ++i)
    if (!(rep.eigenvalue_ratio[i + 1] < rep.eigenvalue_ratio[i]))
      rep.ratios_strictly_decreasing = false;
  return rep;
}

namespace {

// A (dx-multiple y, any k) conjugation: (D A D^dag)_{jl} =
// e^{i k (x_j - x_l)/hbar} A_{j-a, l-a} with a the node shift.
void conjugate_into(const Eigen::MatrixXcd& a, int shift, double k,
                    const PhaseGrid& grid, double weight, Eigen::MatrixXcd& acc) {
  const int n = grid.n;
  for (int j = 0; j < n; ++j) {
    const int js = ((j - shift) % n + n) % n;
    for (int l = 0; l < n; ++l) {
      const int ls = ((l - shift) % n + n) % n;
      const std::complex<double> phase =
          std::polar(weight, k * (grid.x(j) - grid.x(l)) / grid.hbar);
      acc(j, l) += phase * a(js, ls);
    }
  }
}

int node_shift_of(const LatticeSpec& yk, int i, const PhaseGrid& grid) {
  const double y = yk.x_node(i);
  const double a = y / grid.dx;
  const long r = std::lround(a);
  if (std::abs(a - static_cast<double>(r)) > 1e-9)
    throw PreconditionError("y nodes must be grid multiples");
  return static_cast<int>(((r % grid.n) + grid.n) % grid.n);
}

}  // namespace

TraceFixing trace_fixing_constant(const LocalizationOperator& op, const PhaseGrid& grid,
                                  double tau, const LatticeSpec& yk_lattice) {
  if (!(tau > 0.0)) throw PreconditionError("collapse time must be positive");
  LocalizationOperator centered = op;
  centered.y = 0.0;
  centered.k = 0.0;
  const SOperatorEigs eig = solve_S_impl(centered, grid);
  const Eigen::MatrixXcd e2s = eig.vectors *
                               (-2.0 * eig.values.array()).exp().matrix().asDiagonal() *
                               eig.vectors.adjoint();

  const double w = yk_lattice.dx * yk_lattice.dp / (2.0 * kPi * grid.hbar);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(grid.n, grid.n);
  for (int i = 0; i < yk_lattice.nx; ++i) {
    const int shift = node_shift_of(yk_lattice, i, grid);
    for (int j = 0; j < yk_lattice.np; ++j)
      conjugate_into(e2s, shift, yk_lattice.p_node(j), grid, w, m);
  }
  const double lambda = m.trace().real() / grid.n;
  TraceFixing out;
  out.c = 1.0 / (tau * lambda);
  out.identity_defect =
      (m - lambda * Eigen::MatrixXcd::Identity(grid.n, grid.n)).cwiseAbs().maxCoeff() /
      lambda;
  return out;
}

DensityMatrix integrate_localization_master(const DensityMatrix& rho0,
                                            const Potential& pot,
                                            const EvolutionConfig& cfg,
                                            const LocalizationOperator& op,
                                            double tau, const LatticeSpec& yk_lattice,
                                            double duration) {
  const PhaseGrid& grid = rho0.grid;
  if (yk_lattice.cells() > 256)
    throw PreconditionError("node set too large for the dense channel sum");
  const TraceFixing fix = trace_fixing_constant(op, grid, tau, yk_lattice);

  LocalizationOperator centered = op;
  centered.y = 0.0;
  centered.k = 0.0;
  const SOperatorEigs eig = solve_S_impl(centered, grid);
  const Eigen::MatrixXcd es = eig.vectors *
                              (-eig.values.array()).exp().matrix().asDiagonal() *
                              eig.vectors.adjoint();
  // shifted channel operators e^{-S_{y,k}}
  std::vector<Eigen::MatrixXcd> chan;
  chan.reserve(yk_lattice.cells());
  for (int i = 0; i < yk_lattice.nx; ++i) {
    const int shift = node_shift_of(yk_lattice, i, grid);
    for (int j = 0; j < yk_lattice.np; ++j) {
      Eigen::MatrixXcd e = Eigen::MatrixXcd::Zero(grid.n, grid.n);
      conjugate_into(es, shift, yk_lattice.p_node(j), grid, 1.0, e);
      chan.push_back(std::move(e));
    }
  }

  const double w = yk_lattice.dx * yk_lattice.dp / (2.0 * kPi * grid.hbar);
  const std::complex<double> iu(0.0, 1.0);
  Eigen::MatrixXcd h_rho(grid.n, grid.n), tmp(grid.n, grid.n);
  auto rhs = [&](const Eigen::MatrixXcd& r, Eigen::MatrixXcd& out) {
    apply_hamiltonian(pot, cfg.mass, r, h_rho);
    out = (iu / grid.hbar) * (h_rho.adjoint() - h_rho);
    out -= r / tau;
    for (const Eigen::MatrixXcd& e : chan) {
      tmp.noalias() = e * r;
      out.noalias() += (fix.c * w) * (tmp * e);
    }
  };

  const long nsteps = std::max(1L, static_cast<long>(std::ceil(duration / cfg.dt - 1e-12)));
  const double h = duration / static_cast<double>(nsteps);
  DensityMatrix rho = rho0;
  Eigen::MatrixXcd k1(grid.n, grid.n), k2(grid.n, grid.n), k3(grid.n, grid.n),
      k4(grid.n, grid.n);
  for (long s = 0; s < nsteps; ++s) {
    rhs(rho.m, k1);
    tmp = rho.m + 0.5 * h * k1;
    rhs(tmp, k2);
    tmp = rho.m + 0.5 * h * k2;
    rhs(tmp, k3);
    tmp = rho.m + h * k3;
    rhs(tmp, k4);
    rho.m += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return rho;
}

MsdSeries localization_experiment(const LocalizationConfig& cfg) {
  if (cfg.n_walkers <= 0 || cfg.n_disorder_seeds <= 0)
    throw PreconditionError("need walkers and disorder seeds");
  if (!(cfg.horizon > 0.0) || cfg.n_times < 2)
    throw PreconditionError("need a horizon and >= 2 sample times");
  if (!(cfg.horizon >= 5.0 * cfg.tau))
    throw PreconditionError("horizon must cover many collapse times");

  const PhaseGrid& grid = cfg.grid;
  const double limit = 0.5 * grid.box_length - cfg.edge_margin;
  std::vector<double> times;
  for (int k = 0; k < cfg.n_times; ++k)
    times.push_back((k + 1) * cfg.horizon / cfg.n_times);

  MsdSeries out;
  out.times = times;
  out.msd_quantum.assign(times.size(), 0.0);
  out.msd_classical.assign(times.size(), 0.0);

  const EvolutionConfig ecfg{cfg.mass, cfg.dt};
  const std::size_t nt = times.size();

  struct Partial {
    Eigen::ArrayXd q, c;
    long nq = 0, nc = 0, aq = 0, ac = 0;
  };

  for (int d = 0; d < cfg.n_disorder_seeds; ++d) {
    const std::uint64_t dseed = mix64(cfg.base_seed + 7919 * (d + 1));
    out.disorder_seeds.push_back(dseed);
    const Potential pot =
        cfg.strength > 0.0
            ? disorder_potential(grid, cfg.strength, cfg.corr_length, cfg.carrier,
                                 dseed)
            : free_potential(grid);
    const StateVector psi0 = make_gaussian_packet(grid, {0.0, cfg.p0, cfg.sigma});
    const double x_start = mean_x(psi0);
    const std::uint64_t walker_seed = mix64(dseed ^ 0x77616c6bULL);
    const std::uint64_t cloud_seed = mix64(dseed ^ 0x636c6f7564ULL);

    auto make = [&] {
      Partial p;
      p.q = Eigen::ArrayXd::Zero(nt);
      p.c = Eigen::ArrayXd::Zero(nt);
      return p;
    };
    auto item = [&](std::size_t i, Partial& acc) {
      // quantum walker
      std::vector<double> series(nt, 0.0);
      bool wrapped = false;
      detail::ChainHooks hooks;
      hooks.sample_times = &times;
      hooks.on_sample = [&](std::size_t k, const StateVector& state, bool) {
        const double x = mean_x(state);
        if (std::abs(x) > limit) wrapped = true;
        series[k] = (x - x_start) * (x - x_start);
      };
      hooks.on_jump = [&](const JumpEvent& ev, const StateVector&) {
        if (std::abs(ev.x) > limit) wrapped = true;
      };
      detail::run_chain(psi0, pot, ecfg, cfg.tau, cfg.sigma, 0.0,
                        cfg.horizon + 1e-12, walker_seed, i, hooks);
      if (wrapped) {
        ++acc.aq;
      } else {
        for (std::size_t k = 0; k < nt; ++k) acc.q(k) += series[k];
        ++acc.nq;
      }

      // classical partner: same renewal clock and Newtonian transport, with
      // the collapse modeled as a Gaussian relocation carrying the packet's
      // Husimi widths (2 sigma^2 in position, hbar^2/(2 sigma^2) in
      // momentum), so both walks heat identically. The trajectory is
      // unwrapped (the potential is periodic), so no edge rejection.
      Rng rng = Rng::stream(cloud_seed, i);
      // every quantum chain starts from the same packet, so its centroid
      // starts sharp at (x_start, p0); the partner must start sharp too —
      // sampling the initial Husimi cloud instead would hand the classical
      // side one full collapse of extra momentum spread
      ClassicalState s;
      s.x = x_start;
      s.p = cfg.p0;
      const double cx0 = s.x;
      const double kick_x = std::sqrt(2.0) * cfg.sigma;
      const double kick_p = grid.hbar / (std::sqrt(2.0) * cfg.sigma);
      double t_cur = 0.0;
      double t_jump = rng.exponential(cfg.tau);
      std::vector<double> cser(nt, 0.0);
      std::size_t k = 0;
      while (k < nt) {
        if (times[k] <= t_jump) {
          s = evolve_classical(s, pot, cfg.mass, cfg.dt, times[k] - t_cur);
          t_cur = times[k];
          cser[k] = (s.x - cx0) * (s.x - cx0);
          ++k;
        } else {
          s = evolve_classical(s, pot, cfg.mass, cfg.dt, t_jump - t_cur);
          t_cur = t_jump;
          s.x += kick_x * rng.normal();
          s.p += kick_p * rng.normal();
          t_jump = t_cur + rng.exponential(cfg.tau);
        }
      }
      for (std::size_t j = 0; j < nt; ++j) acc.c(j) += cser[j];
      ++acc.nc;
    };
    auto partials = blockwise_partials<Partial>(
        static_cast<std::size_t>(cfg.n_walkers), 16, make, item);
    for (const Partial& p : partials) {
      for (std::size_t k = 0; k < nt; ++k) {
        out.msd_quantum[k] += p.q(k);
        out.msd_classical[k] += p.c(k);
      }
      out.n_quantum += static_cast<int>(p.nq);
      out.n_classical += static_cast<int>(p.nc);
      out.aborted_quantum += static_cast<int>(p.aq);
      out.aborted_classical += static_cast<int>(p.ac);
    }
  }

  if (out.n_quantum == 0 || out.n_classical == 0)
    throw NumericalError("every sample hit the box edge; enlarge the box");
  for (std::size_t k = 0; k < nt; ++k) {
    out.msd_quantum[k] /= out.n_quantum;
    out.msd_classical[k] /= out.n_classical;
  }
  return out;
}

double late_slope(const std::vector<double>& times, const std::vector<double>& series,
                  double frac) {
  if (times.size() != series.size() || times.size() < 2)
    throw PreconditionError("mismatched or short series");
  if (!(frac > 0.0) || frac >= 1.0) throw PreconditionError("frac must be in (0,1)");
  const double cut = times.back() * frac;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  long n = 0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < cut) continue;
    sx += times[i];
    sy += series[i];
    sxx += times[i] * times[i];
    sxy += times[i] * series[i];
    ++n;
  }
  if (n < 2) throw PreconditionError("trailing window holds < 2 points");
  const double det = n * sxx - sx * sx;
  if (det == 0.0) throw NumericalError("degenerate time window");
  return (n * sxy - sx * sy) / det;
}

}  // namespace packetsim
