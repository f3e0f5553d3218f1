#include "packetsim/lindblad.hpp"

#include <cmath>
#include <optional>

#include "packetsim/fft.hpp"

namespace packetsim {

PacketChannel::PacketChannel(const PhaseGrid& grid, double sigma)
    : grid_(grid), sigma_(sigma), lattice_(LatticeSpec::reference(grid, sigma)) {
  const int n = grid.n;
  Eigen::ArrayXd g(n);
  double norm2 = 0.0;
  for (int m = 0; m < n; ++m) {
    const double w = grid.wrap(m * grid.dx);
    g(m) = std::exp(-w * w / (4.0 * sigma * sigma));
    norm2 += g(m) * g(m);
  }
  c2_ = 1.0 / norm2;

  qhat_.resize(n, n);
  rhat_.resize(n, n);
  Eigen::VectorXcd q(n);
  for (int d = 0; d < n; ++d) {
    for (int m = 0; m < n; ++m) q(m) = g((m + d) % n) * g(m);
    fft_forward(q);
    qhat_.col(d) = q;
    rhat_.col(d) = q.array().abs2();
  }
}

// All three operations work per circular diagonal d of the density matrix,
// where the lattice sums collapse to circular convolutions:
//   apply:   out_d = C^4 * ifft(|qhat_d|^2 .* fft(in_d))
//   husimi:  s_d   = C^2 * ifft(conj(qhat_d) .* fft(in_d)), then an FFT
//            across d turns s into the momentum dependence
//   mixture: out_d = w * C^2 * ifft(qhat_d .* fft(z_d)) with z the inverse
//            momentum transform of the field
// The n * weight = 1 identity of the reference lattice is what makes apply
// preserve the trace exactly.

void PacketChannel::apply(const Eigen::MatrixXcd& rho, Eigen::MatrixXcd& out) const {
  const int n = grid_.n;
  out.resize(n, n);
  const double pref = c2_ * c2_;
  Eigen::VectorXcd diag(n);
  for (int d = 0; d < n; ++d) {
    for (int l = 0; l < n; ++l) diag(l) = rho((l + d) % n, l);
    fft_forward(diag);
    diag.array() *= rhat_.col(d).cast<std::complex<double>>();
    fft_inverse(diag);
    for (int l = 0; l < n; ++l) out((l + d) % n, l) = pref * diag(l);
  }
}

PhaseSpaceField PacketChannel::husimi(const Eigen::MatrixXcd& rho) const {
  const int n = grid_.n;
  PhaseSpaceField field = PhaseSpaceField::zero(lattice_, grid_.hbar);
  // s(a, d) indexed with d down the columns so the final transforms are
  // contiguous
  Eigen::MatrixXcd s(n, n);
  Eigen::VectorXcd diag(n);
  for (int d = 0; d < n; ++d) {
    for (int l = 0; l < n; ++l) diag(l) = rho((l + d) % n, l);
    fft_forward(diag);
    diag.array() *= qhat_.col(d).conjugate().array();
    fft_inverse(diag);
    for (int a = 0; a < n; ++a) s(d, a) = diag(a);
  }
  Eigen::VectorXcd row(n);
  for (int a = 0; a < n; ++a) {
    row = s.col(a);
    fft_forward(row);
    for (int b = 0; b < n; ++b) {
      const int bin = (b + n / 2) % n;  // band b carries momentum (b - n/2) dp
      field.values(a, b) = c2_ * row(bin).real();
    }
  }
  return field;
}

Eigen::MatrixXcd PacketChannel::mixture(const PhaseSpaceField& field) const {
  const int n = grid_.n;
  if (field.spec.nx != n || field.spec.np != n)
    throw PreconditionError("field does not live on the reference lattice");
  const double weight = 1.0 / static_cast<double>(n);
  Eigen::MatrixXcd z(n, n);  // z(d, a)
  Eigen::VectorXcd t(n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) t((b + n / 2) % n) = field.values(a, b);
    fft_inverse(t);
    z.col(a) = t * static_cast<double>(n);
  }
  Eigen::MatrixXcd out(n, n);
  Eigen::VectorXcd g(n);
  for (int d = 0; d < n; ++d) {
    for (int a = 0; a < n; ++a) g(a) = z(d, a);
    fft_forward(g);
    g.array() *= qhat_.col(d).array();
    fft_inverse(g);
    for (int l = 0; l < n; ++l) out((l + d) % n, l) = weight * c2_ * g(l);
  }
  return out;
}

namespace {

void commutator_term(const DensityMatrix& rho, const Potential& pot, double mass,
                     Eigen::MatrixXcd& scratch, Eigen::MatrixXcd& out) {
  apply_hamiltonian(pot, mass, rho.m, scratch);  // scratch = H rho
  const std::complex<double> i_over_hbar(0.0, 1.0 / rho.grid.hbar);
  out = i_over_hbar * (scratch.adjoint() - scratch);
}

}  // namespace

void lindblad_rhs(const DensityMatrix& rho, const Potential& pot, double mass,
                  const CollapseChannelSet& channels, Eigen::MatrixXcd& out) {
  Eigen::MatrixXcd scratch;
  commutator_term(rho, pot, mass, scratch, out);

  if (const auto* ps = std::get_if<PhaseSpaceChannels>(&channels)) {
    if (!(ps->tau > 0.0)) throw PreconditionError("collapse time must be positive");
    PacketChannel channel(rho.grid, ps->sigma);
    channel.apply(rho.m, scratch);
    out += (scratch - rho.m) / ps->tau;
    return;
  }

  const auto& dk = std::get<DiscreteKetChannels>(channels);
  const int nk = static_cast<int>(dk.kets.size());
  if (dk.rates.rows() != nk || dk.rates.cols() != nk)
    throw PreconditionError("rate matrix shape must match the ket count");
  // populations h(l2) = <phi_l2|rho|phi_l2>, feed through the rate matrix,
  // anticommutator with the total out-rate operator
  Eigen::VectorXd h(nk);
  for (int l2 = 0; l2 < nk; ++l2)
    h(l2) = (dk.kets[l2].amp.adjoint() * rho.m * dk.kets[l2].amp)(0, 0).real();
  Eigen::VectorXd feed = dk.rates * h;
  for (int l = 0; l < nk; ++l)
    out += feed(l) * (dk.kets[l].amp * dk.kets[l].amp.adjoint());
  Eigen::VectorXd out_rate = dk.rates.colwise().sum().transpose();
  for (int l2 = 0; l2 < nk; ++l2) {
    const Eigen::VectorXcd& k = dk.kets[l2].amp;
    Eigen::VectorXcd rk = rho.m * k;
    Eigen::MatrixXcd anti = k * rk.adjoint();
    out -= 0.5 * out_rate(l2) * (anti + anti.adjoint());
  }
}

namespace {

struct Rk4Workspace {
  Eigen::MatrixXcd k1, k2, k3, k4, stage;
};

class RhsEvaluator {
 public:
  RhsEvaluator(const PhaseGrid& grid, const Potential& pot, double mass,
               const CollapseChannelSet& channels)
      : pot_(pot), mass_(mass), channels_(channels) {
    if (const auto* ps = std::get_if<PhaseSpaceChannels>(&channels)) {
      if (!(ps->tau > 0.0)) throw PreconditionError("collapse time must be positive");
      channel_.emplace(grid, ps->sigma);
      tau_ = ps->tau;
    }
  }

  void operator()(const DensityMatrix& rho, Eigen::MatrixXcd& out) {
    if (channel_) {
      commutator_term(rho, pot_, mass_, scratch_, out);
      channel_->apply(rho.m, scratch_);
      out += (scratch_ - rho.m) / tau_;
    } else {
      lindblad_rhs(rho, pot_, mass_, channels_, out);
    }
  }

 private:
  const Potential& pot_;
  double mass_;
  const CollapseChannelSet& channels_;
  std::optional<PacketChannel> channel_;
  double tau_ = 0.0;
  Eigen::MatrixXcd scratch_;
};

}  // namespace

DensityMatrix integrate_lindblad(const DensityMatrix& rho0, const Potential& pot,
                                 const EvolutionConfig& cfg,
                                 const CollapseChannelSet& channels,
                                 double duration, const IntegrateOptions& opts) {
  if (duration < 0.0) throw PreconditionError("duration must be non-negative");
  validate_evolution(rho0.grid, pot, cfg);
  RhsEvaluator rhs(rho0.grid, pot, cfg.mass, channels);

  DensityMatrix rho = rho0;
  const long nsteps = duration == 0.0
      ? 0L
      : std::max(1L, static_cast<long>(std::ceil(duration / cfg.dt - 1e-12)));
  const double h = nsteps ? duration / static_cast<double>(nsteps) : 0.0;

  Rk4Workspace w;
  DensityMatrix tmp = rho0;
  double next_observe = 0.0;
  if (opts.observer && opts.observer_interval > 0.0) {
    opts.observer(0.0, rho);
    next_observe = opts.observer_interval;
  }

  for (long s = 0; s < nsteps; ++s) {
    rhs(rho, w.k1);
    tmp.m = rho.m + 0.5 * h * w.k1;
    rhs(tmp, w.k2);
    tmp.m = rho.m + 0.5 * h * w.k2;
    rhs(tmp, w.k3);
    tmp.m = rho.m + h * w.k3;
    rhs(tmp, w.k4);
    rho.m += (h / 6.0) * (w.k1 + 2.0 * w.k2 + 2.0 * w.k3 + w.k4);

    const double t = static_cast<double>(s + 1) * h;
    if (std::abs(rho.trace_real() - 1.0) > opts.trace_tol)
      throw NumericalError("trace left its tolerance during integration");
    if (opts.positivity_interval > 0 && (s + 1) % opts.positivity_interval == 0) {
      if (rho.min_eigenvalue() < opts.positivity_floor)
        throw NumericalError("density matrix developed a negative eigenvalue");
    }
    if (opts.observer && opts.observer_interval > 0.0 &&
        t >= next_observe - 1e-9 * cfg.dt) {
      opts.observer(t, rho);
      next_observe += opts.observer_interval;
    }
  }
  return rho;
}

double integral_form_residual(const DensityMatrix& rho0, const Potential& pot,
                              const EvolutionConfig& cfg,
                              const PhaseSpaceChannels& channels, double t,
                              int quad_stride) {
  if (t < 0.0) throw PreconditionError("time must be non-negative");
  if (quad_stride < 1) throw PreconditionError("quadrature stride must be >= 1");
  const PhaseGrid& grid = rho0.grid;
  const double tau = channels.tau;
  PacketChannel channel(grid, channels.sigma);

  DensityMatrix direct = integrate_lindblad(rho0, pot, cfg, channels, t);
  if (t == 0.0) return (direct.m - rho0.m).cwiseAbs().maxCoeff();

  const long nsteps = std::max(1L, static_cast<long>(std::ceil(t / cfg.dt - 1e-12)));
  const long nquad = std::max(1L, nsteps / quad_stride);
  const double dxi = t / static_cast<double>(nquad);

  // Trapezoid in the jump age xi, evaluated by the nested recursion
  //   A_j = U(dxi) A_{j+1} U(dxi)* + w_j e^{-xi_j/tau} M(t - xi_j)
  // which consumes the collapse feed M at increasing times; a second
  // integration pass supplies those checkpoints in the same order.
  EvolutionConfig sub = cfg;
  sub.dt = std::min(cfg.dt, dxi);
  Propagator prop(grid, pot, sub);

  auto propagate_cols = [&](Eigen::MatrixXcd& mat) {
    StateVector col;
    col.grid = grid;
    for (int c = 0; c < grid.n; ++c) {
      col.amp = mat.col(c);
      prop.advance(col, dxi);
      mat.col(c) = col.amp;
    }
  };

  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(grid.n, grid.n);
  DensityMatrix walk = rho0;
  Eigen::MatrixXcd feed;
  for (long j = nquad; j >= 0; --j) {
    // at iteration j the accumulated term equals the tail of the xi
    // integral; walk(t') below carries t' = t - xi_j
    const double t_prime = t - static_cast<double>(j) * dxi;
    if (j < nquad) {
      propagate_cols(acc);
      acc = acc.adjoint().eval();
      propagate_cols(acc);
      acc = acc.adjoint().eval();
      walk = integrate_lindblad(walk, pot, cfg, CollapseChannelSet(channels),
                                dxi, IntegrateOptions{1e-4, 0, -1e-8, 0.0, {}});
    }
    const double xi = t - t_prime;
    const double w = (j == 0 || j == nquad) ? 0.5 : 1.0;
    channel.apply(walk.m, feed);
    acc += (w * dxi / tau * std::exp(-xi / tau)) * feed;
  }

  // no-jump branch
  StateVector col;
  col.grid = grid;
  Eigen::MatrixXcd free_branch = rho0.m;
  {
    EvolutionConfig full = cfg;
    Propagator prop_full(grid, pot, full);
    for (int c = 0; c < grid.n; ++c) {
      col.amp = free_branch.col(c);
      prop_full.advance(col, t);
      free_branch.col(c) = col.amp;
    }
    free_branch = free_branch.adjoint().eval();
    for (int c = 0; c < grid.n; ++c) {
      col.amp = free_branch.col(c);
      prop_full.advance(col, t);
      free_branch.col(c) = col.amp;
    }
    free_branch = free_branch.adjoint().eval();
  }
  const Eigen::MatrixXcd reconstructed = std::exp(-t / tau) * free_branch + acc;
  const double scale = direct.m.cwiseAbs().maxCoeff();
  return (direct.m - reconstructed).cwiseAbs().maxCoeff() / scale;
}

}  // namespace packetsim
