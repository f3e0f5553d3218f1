#include "packetsim/coarse.hpp"

#include <algorithm>
#include <cmath>

#include "chain.hpp"
#include "packetsim/parallel.hpp"
#include "packetsim/rng.hpp"

namespace packetsim {

LatticeSpec CoarseSpec::coarse_lattice() const {
  LatticeSpec c;
  c.x0 = fine.x0 + 0.5 * (sx - 1) * fine.dx;
  c.dx = sx * fine.dx;
  c.nx = ncx();
  c.p0 = fine.p0 + 0.5 * (sp - 1) * fine.dp;
  c.dp = sp * fine.dp;
  c.np = ncp();
  c.sigma = fine.sigma;
  return c;
}

void CoarseSpec::validate(const PhaseGrid& grid) const {
  fine.validate(grid);
  if (!fine.is_reference_of(grid))
    throw PreconditionError("coarse graining requires the reference fine lattice");
  if (sx < 1 || sp < 1) throw PreconditionError("cells need at least one fine node");
  if ((sx > 1 && sx < 4) || (sp > 1 && sp < 4))
    throw PreconditionError("coarse cells must hold >= 4 fine nodes per axis");
  if (fine.nx % sx != 0 || fine.np % sp != 0)
    throw PreconditionError("coarse cells must tile the fine lattice");
  if (T < 0.0) throw PreconditionError("negative time window");
}

PhaseSpaceField coarse_kernel_Psi(const PhaseGrid& grid, const CoarseSpec& spec,
                                  int ci, int cj, double xi, const Potential& pot,
                                  const EvolutionConfig& cfg, double tau) {
  spec.validate(grid);
  if (ci < 0 || ci >= spec.ncx() || cj < 0 || cj >= spec.ncp())
    throw PreconditionError("source cell outside the coarse lattice");
  PhaseSpaceField out = PhaseSpaceField::zero(spec.coarse_lattice(), grid.hbar);
  for (int a = 0; a < spec.sx; ++a)
    for (int b = 0; b < spec.sp; ++b) {
      const double x_src = spec.fine.x_node(ci * spec.sx + a);
      const double p_src = spec.fine.p_node(cj * spec.sp + b);
      const PhaseSpaceField fine =
          kernel_psi(grid, x_src, p_src, xi, pot, cfg, tau, spec.fine);
      for (int c = 0; c < spec.ncx(); ++c)
        for (int d = 0; d < spec.ncp(); ++d)
          out.values(c, d) += fine.values(c * spec.sx + a, d * spec.sp + b);
    }
  out.values /= static_cast<double>(spec.sx * spec.sp);
  return out;
}

ShiftQuadrature midpoint_shift_quadrature(double delta1, int ny, double delta2, int nk) {
  if (ny < 1 || nk < 1) throw PreconditionError("quadrature needs >= 1 node per axis");
  ShiftQuadrature q;
  for (int a = 0; a < ny; ++a)
    q.y.push_back(delta1 == 0.0 ? 0.0 : -delta1 + (a + 0.5) * 2.0 * delta1 / ny);
  for (int b = 0; b < nk; ++b)
    q.k.push_back(delta2 == 0.0 ? 0.0 : -delta2 + (b + 0.5) * 2.0 * delta2 / nk);
  return q;
}

PhaseSpaceField coarse_kernel_shifted(const PhaseGrid& grid, const CoarseSpec& spec,
                                      double x_src, double p_src, double xi,
                                      const Potential& pot, const EvolutionConfig& cfg,
                                      double tau, const ShiftQuadrature& quad) {
  spec.validate(grid);
  if (!(tau > 0.0)) throw PreconditionError("collapse time must be positive");
  const LatticeSpec coarse = spec.coarse_lattice();
  PhaseSpaceField out = PhaseSpaceField::zero(coarse, grid.hbar);
  const double sigma = spec.fine.sigma;
  for (double y : quad.y)
    for (double k : quad.k) {
      StateVector psi = make_gaussian_packet(grid, {x_src + y, p_src + k, sigma});
      psi = evolve_unitary(psi, pot, cfg, xi);
      for (int c = 0; c < coarse.nx; ++c)
        for (int d = 0; d < coarse.np; ++d)
          out.values(c, d) +=
              husimi_overlap(psi, coarse.x_node(c) + y, coarse.p_node(d) + k, sigma);
    }
  out.values *= std::exp(-xi / tau) / tau /
                static_cast<double>(quad.y.size() * quad.k.size());
  return out;
}

HamiltonianFamily HamiltonianFamily::uniform(double delta1, int n_y) {
  if (delta1 < 0.0) throw PreconditionError("negative window half-width");
  HamiltonianFamily f;
  f.delta1 = delta1;
  if (delta1 == 0.0) {
    f.y_nodes.push_back(0.0);
    return f;
  }
  if (n_y < 16) throw PreconditionError("uniform window quadrature needs >= 16 nodes");
  for (int a = 0; a < n_y; ++a)
    f.y_nodes.push_back(-delta1 + (a + 0.5) * 2.0 * delta1 / n_y);
  return f;
}

DensityMatrix jaynes_sigma(const PhaseGrid& grid, double x_src, double p_src,
                           double sigma, double xi, const Potential& pot,
                           const EvolutionConfig& cfg, const HamiltonianFamily& family) {
  if (family.y_nodes.empty()) throw PreconditionError("empty shift family");
  const StateVector phi = make_gaussian_packet(grid, {x_src, p_src, sigma});
  DensityMatrix sigma_out = DensityMatrix::zero(grid);
  const double w = 1.0 / static_cast<double>(family.y_nodes.size());
  for (double y : family.y_nodes) {
    StateVector chi = translate_position(phi, y);
    chi = evolve_unitary(chi, pot, cfg, xi);
    chi = translate_position(chi, -y);
    sigma_out.m.noalias() += w * (chi.amp * chi.amp.adjoint());
  }
  return sigma_out;
}

PhaseSpaceField coarse_kernel_jaynes(const PhaseGrid& grid, const CoarseSpec& spec,
                                     double x_src, double p_src, double xi,
                                     const Potential& pot, const EvolutionConfig& cfg,
                                     double tau, const ShiftQuadrature& quad) {
  spec.validate(grid);
  if (!(tau > 0.0)) throw PreconditionError("collapse time must be positive");
  const LatticeSpec coarse = spec.coarse_lattice();
  PhaseSpaceField out = PhaseSpaceField::zero(coarse, grid.hbar);
  const double sigma = spec.fine.sigma;
  HamiltonianFamily family;
  family.delta1 = quad.y.empty() ? 0.0 : std::abs(quad.y.back());
  family.y_nodes = quad.y;
  for (double k : quad.k) {
    const DensityMatrix sig =
        jaynes_sigma(grid, x_src, p_src + k, sigma, xi, pot, cfg, family);
    for (int c = 0; c < coarse.nx; ++c)
      for (int d = 0; d < coarse.np; ++d) {
        const StateVector probe = make_gaussian_packet(
            grid, {coarse.x_node(c), coarse.p_node(d) + k, sigma});
        out.values(c, d) += (probe.amp.adjoint() * sig.m * probe.amp)(0, 0).real();
      }
  }
  out.values *= std::exp(-xi / tau) / tau / static_cast<double>(quad.k.size());
  return out;
}

namespace {

void coarse_cell_of(const CoarseSpec& spec, double x, double p, int& ci, int& cj) {
  int i = static_cast<int>(std::lround((x - spec.fine.x0) / spec.fine.dx));
  i %= spec.fine.nx;
  if (i < 0) i += spec.fine.nx;
  int j = static_cast<int>(std::lround((p - spec.fine.p0) / spec.fine.dp));
  j = std::clamp(j, 0, spec.fine.np - 1);
  ci = i / spec.sx;
  cj = j / spec.sp;
}

// trapezoid weights of history samples covering [t, t + T]
std::vector<std::pair<std::size_t, double>> window_weights(const FieldHistory& h,
                                                           double t, double T) {
  if (h.times.size() != h.fields.size() || h.times.size() < 2)
    throw PreconditionError("field history needs matching times and >= 2 samples");
  const double eps = 1e-9 * std::max(1.0, std::abs(t) + T);
  std::vector<std::size_t> in;
  for (std::size_t i = 0; i < h.times.size(); ++i)
    if (h.times[i] >= t - eps && h.times[i] <= t + T + eps) in.push_back(i);
  if (in.size() < 2 || std::abs(h.times[in.front()] - t) > eps ||
      std::abs(h.times[in.back()] - (t + T)) > eps)
    throw PreconditionError("field history does not cover the requested window");
  std::vector<std::pair<std::size_t, double>> w;
  for (std::size_t q = 0; q < in.size(); ++q) {
    const double left = q == 0 ? h.times[in[q]] : h.times[in[q - 1]];
    const double right = q + 1 == in.size() ? h.times[in[q]] : h.times[in[q + 1]];
    w.emplace_back(in[q], 0.5 * (right - left) / T);
  }
  return w;
}

Eigen::ArrayXXd cell_average(const CoarseSpec& spec, const Eigen::ArrayXXd& fine) {
  Eigen::ArrayXXd out = Eigen::ArrayXXd::Zero(spec.ncx(), spec.ncp());
  for (int c = 0; c < spec.ncx(); ++c)
    for (int d = 0; d < spec.ncp(); ++d) {
      double acc = 0.0;
      for (int a = 0; a < spec.sx; ++a)
        for (int b = 0; b < spec.sp; ++b)
          acc += fine(c * spec.sx + a, d * spec.sp + b);
      out(c, d) = acc / static_cast<double>(spec.sx * spec.sp);
    }
  return out;
}

}  // namespace

PhaseSpaceField macro_density_R(const std::vector<Walker>& walkers,
                                const CoarseSpec& spec, double t) {
  if (!(spec.T > 0.0)) throw PreconditionError("time window must be positive");
  if (walkers.empty()) throw PreconditionError("empty walker ensemble");
  for (const Walker& w : walkers)
    if (w.t_final < t + spec.T)
      throw PreconditionError("walker history does not span the window");
  PhaseSpaceField out = PhaseSpaceField::zero(spec.coarse_lattice(), spec.hbar);
  for (const Walker& w : walkers)
    for (const JumpEvent& ev : w.jumps) {
      if (ev.t < t || ev.t >= t + spec.T) continue;
      int ci, cj;
      coarse_cell_of(spec, ev.x, ev.p, ci, cj);
      out.values(ci, cj) += 1.0;
    }
  out.values /= static_cast<double>(walkers.size()) * spec.T * out.cell_weight();
  return out;
}

PhaseSpaceField macro_density_R(const FieldHistory& history,
                                const CoarseSpec& spec, double t) {
  if (!(spec.T > 0.0)) throw PreconditionError("time window must be positive");
  const auto weights = window_weights(history, t, spec.T);
  Eigen::ArrayXXd fine = Eigen::ArrayXXd::Zero(spec.fine.nx, spec.fine.np);
  for (const auto& [idx, w] : weights) fine += w * history.fields[idx].values;
  PhaseSpaceField out = PhaseSpaceField::zero(spec.coarse_lattice(), spec.hbar);
  out.values = cell_average(spec, fine);
  return out;
}

double homogeneity_max_deviation(const FieldHistory& history,
                                 const CoarseSpec& spec, double t) {
  if (!(spec.T > 0.0)) throw PreconditionError("time window must be positive");
  const auto weights = window_weights(history, t, spec.T);
  Eigen::ArrayXXd fine = Eigen::ArrayXXd::Zero(spec.fine.nx, spec.fine.np);
  for (const auto& [idx, w] : weights) fine += w * history.fields[idx].values;
  const Eigen::ArrayXXd coarse = cell_average(spec, fine);
  const double peak = coarse.maxCoeff();
  if (!(peak > 0.0)) throw PreconditionError("empty density window");
  double dev = 0.0;
  for (int c = 0; c < spec.ncx(); ++c)
    for (int d = 0; d < spec.ncp(); ++d)
      for (int a = 0; a < spec.sx; ++a)
        for (int b = 0; b < spec.sp; ++b)
          dev = std::max(dev, std::abs(fine(c * spec.sx + a, d * spec.sp + b) -
                                       coarse(c, d)) /
                                  peak);
  return dev;
}

RenewalCheck macro_renewal_residual(const std::vector<Walker>& walkers,
                                    const StateVector& psi0, const Potential& pot,
                                    const EvolutionConfig& cfg, double tau,
                                    const CoarseSpec& spec, double t0, double t) {
  const PhaseGrid& grid = psi0.grid;
  spec.validate(grid);
  if (!(spec.T > 0.0)) throw PreconditionError("time window must be positive");
  const double span = t - t0;
  const int nb = static_cast<int>(std::lround(span / spec.T));
  if (nb < 1 || std::abs(nb * spec.T - span) > 1e-9 * spec.T)
    throw PreconditionError("target time must be a whole number of windows past t0");

  RenewalCheck out;
  out.lhs = macro_density_R(walkers, spec, t);

  // density history on the window bins
  std::vector<PhaseSpaceField> r_bins;
  r_bins.reserve(nb);
  for (int j = 0; j < nb; ++j)
    r_bins.push_back(macro_density_R(walkers, spec, t0 + j * spec.T));

  // macroscopic source: cell and window average of the fine source field
  const int nq = 4;
  Eigen::ArrayXXd src = Eigen::ArrayXXd::Zero(spec.ncx(), spec.ncp());
  for (int q = 0; q < nq; ++q) {
    const double ts = t + (q + 0.5) * spec.T / nq;
    const PhaseSpaceField s = source_s(psi0, t0, ts, pot, cfg, tau, spec.fine);
    src += cell_average(spec, s.values);
  }
  src /= static_cast<double>(nq);

  // fold the coarse kernel with the binned density: iterate source cells
  // and in-cell offsets, sweeping each packet forward once through all
  // elapsed times (bin midpoints)
  struct SrcTask {
    int ci, cj, a, b;
  };
  std::vector<SrcTask> tasks;
  for (int ci = 0; ci < spec.ncx(); ++ci)
    for (int cj = 0; cj < spec.ncp(); ++cj) {
      bool active = false;
      for (int j = 0; j < nb && !active; ++j)
        if (r_bins[j].values(ci, cj) > 0.0) active = true;
      if (!active) continue;
      for (int a = 0; a < spec.sx; ++a)
        for (int b = 0; b < spec.sp; ++b) tasks.push_back({ci, cj, a, b});
    }

  const double w_coarse = out.lhs.cell_weight();
  const double offset_w = 1.0 / static_cast<double>(spec.sx * spec.sp);
  auto make = [&] { return Eigen::ArrayXXd::Zero(spec.ncx(), spec.ncp()).eval(); };
  auto item = [&](std::size_t ti, Eigen::ArrayXXd& acc) {
    const SrcTask& tk = tasks[ti];
    StateVector psi = make_gaussian_packet(
        grid, {spec.fine.x_node(tk.ci * spec.sx + tk.a),
               spec.fine.p_node(tk.cj * spec.sp + tk.b), spec.fine.sigma});
    Propagator prop(grid, pot, cfg);
    double xi_cur = 0.0;
    for (int s = 0; s < nb; ++s) {
      const double xi = (s + 0.5) * spec.T;  // elapsed time to bin nb-1-s
      prop.advance(psi, xi - xi_cur);
      xi_cur = xi;
      const int j = nb - 1 - s;
      // exact bin mass of the exponential rate; only the smooth packet
      // factor is evaluated at the bin midpoint
      const double bin_mass =
          std::exp(-(s * spec.T) / tau) - std::exp(-((s + 1) * spec.T) / tau);
      const PhaseSpaceField h = husimi_field(psi, spec.fine);
      // destination offsets are averaged over the whole cell; sampling only
      // the source's own offset would sit on the kernel peak every time
      const Eigen::ArrayXXd havg = cell_average(spec, h.values);
      const double feed = w_coarse * offset_w * bin_mass;
      for (int c = 0; c < spec.ncx(); ++c)
        for (int d = 0; d < spec.ncp(); ++d)
          acc(c, d) += feed * havg(c, d) * r_bins[j].values(tk.ci, tk.cj);
    }
  };
  auto partials = blockwise_partials<Eigen::ArrayXXd>(tasks.size(), 4, make, item);

  out.rhs = PhaseSpaceField::zero(spec.coarse_lattice(), spec.hbar);
  out.rhs.values = src;
  for (const Eigen::ArrayXXd& p : partials) out.rhs.values += p;

  const double mass = out.lhs.values.sum();
  const double peak = out.lhs.values.maxCoeff();
  if (mass > 0.0)
    out.residual_l1 = (out.lhs.values - out.rhs.values).abs().sum() / mass;
  if (peak > 0.0)
    out.residual_max = (out.lhs.values - out.rhs.values).abs().maxCoeff() / peak;
  return out;
}

CorrespondenceResult liouville_correspondence_error(
    const StateVector& psi0, const Potential& pot, const EvolutionConfig& cfg,
    double tau, double sigma, int n_samples, const std::vector<double>& times,
    std::uint64_t base_seed, double x_scale, double p_scale) {
  if (n_samples <= 0) throw PreconditionError("need at least one sample");
  if (times.empty()) throw PreconditionError("no comparison times");
  for (std::size_t i = 0; i + 1 < times.size(); ++i)
    if (times[i] > times[i + 1]) throw PreconditionError("times must be ascending");
  if (times.front() < 0.0) throw PreconditionError("negative comparison time");
  if (!(x_scale > 0.0) || !(p_scale > 0.0))
    throw PreconditionError("scales must be positive");

  const PhaseGrid& grid = psi0.grid;
  const std::size_t nt = times.size();
  const double t_final = times.back() + 1e-12;

  struct Partial {
    Eigen::ArrayXd qx, qp, cx, cp;
  };
  auto make = [&] {
    Partial p;
    p.qx = Eigen::ArrayXd::Zero(nt);
    p.qp = Eigen::ArrayXd::Zero(nt);
    p.cx = Eigen::ArrayXd::Zero(nt);
    p.cp = Eigen::ArrayXd::Zero(nt);
    return p;
  };
  const PhaseSpaceField field0 = husimi_field(psi0, LatticeSpec::reference(grid, sigma));
  const std::uint64_t cloud_seed = mix64(base_seed ^ 0x636c6f7564ULL);
  const LatticeSpec& lat = field0.spec;
  const double total0 = field0.values.sum();

  auto item = [&](std::size_t i, Partial& acc) {
    // quantum walker
    detail::ChainHooks hooks;
    hooks.sample_times = &times;
    hooks.on_sample = [&](std::size_t k, const StateVector& state, bool) {
      acc.qx(k) += mean_x(state);
      acc.qp(k) += mean_p(state);
    };
    detail::run_chain(psi0, pot, cfg, tau, sigma, 0.0, t_final, base_seed, i, hooks);

    // classical partner from the same initial density
    Rng rng = Rng::stream(cloud_seed, i);
    const int cell = rng.categorical(field0.values.data(), lat.cells(), total0);
    ClassicalState s;
    s.x = lat.x_node(cell % lat.nx) + (rng.uniform() - 0.5) * lat.dx;
    s.p = lat.p_node(cell / lat.nx) + (rng.uniform() - 0.5) * lat.dp;
    double t_cur = 0.0;
    for (std::size_t k = 0; k < nt; ++k) {
      if (times[k] > t_cur) {
        s = evolve_classical(s, pot, cfg.mass, cfg.dt, times[k] - t_cur);
        t_cur = times[k];
      }
      acc.cx(k) += s.x;
      acc.cp(k) += s.p;
    }
  };
  auto partials =
      blockwise_partials<Partial>(static_cast<std::size_t>(n_samples), 64, make, item);

  Eigen::ArrayXd qx = Eigen::ArrayXd::Zero(nt), qp = qx, cx = qx, cp = qx;
  for (const Partial& p : partials) {
    qx += p.qx;
    qp += p.qp;
    cx += p.cx;
    cp += p.cp;
  }
  const double n = static_cast<double>(n_samples);

  CorrespondenceResult out;
  out.times = times;
  out.regime_ok = 2.0 * cfg.mass * sigma * sigma / grid.hbar > 3.0 * tau;
  for (std::size_t k = 0; k < nt; ++k) {
    const double ex = std::abs(qx(k) - cx(k)) / n;
    const double ep = std::abs(qp(k) - cp(k)) / n;
    out.err_x.push_back(ex);
    out.err_p.push_back(ep);
    out.max_normalized =
        std::max(out.max_normalized, std::hypot(ex / x_scale, ep / p_scale));
  }
  return out;
}

}  // namespace packetsim
