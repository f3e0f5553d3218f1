#include "packetsim/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

#include "packetsim/coarse.hpp"
#include "packetsim/ctrw.hpp"
#include "packetsim/density.hpp"
#include "packetsim/grid.hpp"
#include "packetsim/io.hpp"
#include "packetsim/lattice.hpp"
#include "packetsim/limits.hpp"
#include "packetsim/lindblad.hpp"
#include "packetsim/parallel.hpp"
#include "packetsim/potential.hpp"
#include "packetsim/propagate.hpp"
#include "packetsim/rng.hpp"
#include "packetsim/trajectory.hpp"

namespace packetsim {
namespace {

using nlohmann::json;

struct NamedScenario {
  const char* name;
  Scenario s;
};

constexpr NamedScenario kScenarios[] = {
    {"identity-checks", Scenario::IdentityChecks},
    {"lindblad-vs-ctrw", Scenario::LindbladVsCtrw},
    {"lindblad-vs-trajectories", Scenario::LindbladVsTrajectories},
    {"kernel-normalization", Scenario::KernelNormalization},
    {"liouville-correspondence", Scenario::LiouvilleCorrespondence},
    {"coarse-grain-consistency", Scenario::CoarseGrainConsistency},
    {"localization-msd", Scenario::LocalizationMsd},
    {"exp-S-limit", Scenario::ExpSLimit},
};

json parse_json_text(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ConfigError("config is not valid JSON");
  return j;
}

json child(const json& j, const char* key) {
  if (!j.contains(key)) return json::object();
  const json& c = j.at(key);
  if (!c.is_object())
    throw ConfigError(std::string("config key '") + key + "' must be an object");
  return c;
}

double num(const json& j, const char* key, double dflt) {
  if (!j.contains(key)) return dflt;
  const json& v = j.at(key);
  if (!v.is_number())
    throw ConfigError(std::string("config key '") + key + "' must be a number");
  return v.get<double>();
}

double pos_num(const json& j, const char* key, double dflt) {
  const double v = num(j, key, dflt);
  if (!(v > 0.0) || !std::isfinite(v))
    throw ConfigError(std::string("config key '") + key + "' must be positive");
  return v;
}

int integer(const json& j, const char* key, int dflt) {
  if (!j.contains(key)) return dflt;
  const json& v = j.at(key);
  if (!v.is_number_integer())
    throw ConfigError(std::string("config key '") + key + "' must be an integer");
  return v.get<int>();
}

bool boolean(const json& j, const char* key, bool dflt) {
  if (!j.contains(key)) return dflt;
  const json& v = j.at(key);
  if (!v.is_boolean())
    throw ConfigError(std::string("config key '") + key + "' must be a boolean");
  return v.get<bool>();
}

std::uint64_t u64(const json& j, const char* key, std::uint64_t dflt) {
  if (!j.contains(key)) return dflt;
  const json& v = j.at(key);
  if (!v.is_number_integer())
    throw ConfigError(std::string("config key '") + key + "' must be an integer");
  return v.get<std::uint64_t>();
}

std::string str(const json& j, const char* key, const char* dflt) {
  if (!j.contains(key)) return dflt;
  const json& v = j.at(key);
  if (!v.is_string())
    throw ConfigError(std::string("config key '") + key + "' must be a string");
  return v.get<std::string>();
}

// module preconditions surface as config errors in this layer
template <typename F>
auto checked(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const PreconditionError& e) {
    throw ConfigError(e.what());
  }
}

PhaseGrid read_grid(const json& root, int dflt_n, double dflt_len) {
  const json g = child(root, "grid");
  const int n = integer(g, "n", dflt_n);
  const double len = pos_num(g, "length", dflt_len);
  const double hbar = pos_num(g, "hbar", 1.0);
  return checked([&] { return PhaseGrid::make(n, len, hbar); });
}

Potential read_potential(const json& jp, const PhaseGrid& grid, double mass,
                         std::uint64_t seed_dflt) {
  const std::string kind = str(jp, "kind", "free");
  if (kind == "free") return free_potential(grid);
  if (kind == "harmonic")
    return checked(
        [&] { return harmonic_potential(grid, mass, pos_num(jp, "omega", 0.5)); });
  if (kind == "disorder")
    return checked([&] {
      return disorder_potential(grid, num(jp, "strength", 0.5),
                                pos_num(jp, "corr_length", 1.0),
                                num(jp, "carrier", 0.0), u64(jp, "seed", seed_dflt));
    });
  if (kind == "custom") {
    if (!jp.contains("table"))
      throw ConfigError("custom potential needs a 'table' file path");
    return checked(
        [&] { return load_potential_table(jp.at("table").get<std::string>(), grid); });
  }
  throw ConfigError("unknown potential kind '" + kind + "'");
}

struct Out {
  std::string dir;
  std::vector<std::string> files;

  std::string path(const std::string& name) const { return dir + "/" + name; }
  void series(const std::string& name, const std::vector<std::string>& header,
              const std::vector<std::vector<double>>& cols) {
    write_series_csv(path(name), header, cols);
    files.push_back(name);
  }
  void field(const std::string& name, const PhaseSpaceField& f) {
    write_field_csv(path(name), f);
    files.push_back(name);
  }
  void events(const std::string& name, const std::vector<Walker>& w,
              const std::string& source) {
    write_event_log(path(name), w, source);
    files.push_back(name);
  }
  void events(const std::string& name, const std::vector<Trajectory>& t,
              const std::string& source) {
    write_event_log(path(name), t, source);
    files.push_back(name);
  }
};

using Checks = std::vector<ScenarioCheck>;

void le(Checks& cs, std::string name, double value, double tol) {
  cs.push_back({std::move(name), value, tol, value <= tol});
}

void ge(Checks& cs, std::string name, double value, double tol) {
  cs.push_back({std::move(name), value, tol, value >= tol});
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

StateVector random_state(const PhaseGrid& grid, std::uint64_t seed,
                         std::uint64_t index) {
  Rng rng = Rng::stream(seed, index);
  Eigen::VectorXcd v(grid.n);
  for (int i = 0; i < grid.n; ++i) v(i) = {rng.normal(), rng.normal()};
  StateVector psi{grid, v};
  psi.renormalize();
  return psi;
}

// ---------------------------------------------------------------- identity

void scn_identity(const json& j, Out* out, Checks* cs, json* diag) {
  const PhaseGrid grid = read_grid(j, 64, 32.0);
  const json phys = child(j, "physics");
  const double tau = pos_num(phys, "tau", 1.0);
  const double sigma = pos_num(phys, "sigma", 1.0);
  const double mass = pos_num(phys, "mass", 1.0);
  const double x0 = num(j, "x0", -2.0);
  const double p0 = num(j, "p0", 0.5);
  checked([&] { validate_packet_params(grid, {x0, p0, sigma}); return 0; });

  const json nm = child(j, "numerics");
  const EvolutionConfig cfg{mass, pos_num(nm, "dt", 0.005)};
  json jp = child(j, "potential");
  if (jp.empty()) jp = json{{"kind", "harmonic"}, {"omega", 0.2}};
  const std::uint64_t seed = u64(j, "seed", 20260819);
  const Potential pot = read_potential(jp, grid, mass, seed);
  checked([&] { validate_evolution(grid, pot, cfg); return 0; });

  const int steps = integer(j, "lindblad_steps", 10000);
  if (steps < 1) throw ConfigError("lindblad_steps must be >= 1");
  const double t_int = pos_num(j, "integral_time_frac", 0.1) * tau;

  const json jd = child(j, "decoherence");
  const int nk = integer(jd, "kets", 16);
  const double len2 = pos_num(jd, "length", 16.0);
  const double t_dec = pos_num(jd, "time", 1.0);
  const PhaseGrid g2 = checked([&] { return PhaseGrid::make(nk, len2, grid.hbar); });
  const EvolutionConfig cfg2{mass, pos_num(jd, "dt", 1e-3)};
  const Potential pot2 = free_potential(g2);
  checked([&] { validate_evolution(g2, pot2, cfg2); return 0; });

  if (!out) return;

  // packet family resolves the identity on the reference lattice, and
  // visibly fails to when half the momentum band is removed
  const LatticeSpec ref = LatticeSpec::reference(grid, sigma);
  const auto t0 = std::chrono::steady_clock::now();
  const double resid = identity_residual(grid, ref);
  const double resid_secs = seconds_since(t0);
  le(*cs, "identity_residual_reference", resid, 1e-6);
  le(*cs, "identity_residual_seconds", resid_secs, 10.0);
  LatticeSpec half = ref;
  half.np = ref.np / 2;
  ge(*cs, "identity_residual_half_band", identity_residual(grid, half), 0.1);

  // trace conservation across a long fixed-step integration
  const StateVector psi0 = make_gaussian_packet(grid, {x0, p0, sigma});
  const CollapseChannelSet channels = PhaseSpaceChannels{tau, sigma};
  DensityMatrix rho0 = DensityMatrix::pure(psi0);
  double max_drift = 0.0;
  std::vector<double> ts, drifts;
  IntegrateOptions opts;
  opts.trace_tol = 1e-3;
  opts.observer_interval = 100 * cfg.dt;
  opts.observer = [&](double t, const DensityMatrix& r) {
    const double d = std::abs(r.trace_real() - 1.0);
    max_drift = std::max(max_drift, d);
    ts.push_back(t);
    drifts.push_back(d);
  };
  integrate_lindblad(rho0, pot, cfg, channels, steps * cfg.dt, opts);
  le(*cs, "trace_drift_lindblad", max_drift, 1e-6);
  out->series("trace_drift.csv", {"t", "trace_defect"}, {ts, drifts});

  // jump-expansion (integral) form of the same propagation
  const double ir =
      integral_form_residual(rho0, pot, cfg, PhaseSpaceChannels{tau, sigma}, t_int, 4);
  le(*cs, "integral_form_residual", ir, 1e-3);

  // orthonormal ket set with unit rate matrix: populations frozen,
  // coherences decay exactly as exp(-t/tau)
  std::vector<StateVector> kets;
  Eigen::MatrixXcd K(nk, nk);
  const double inv = 1.0 / std::sqrt(static_cast<double>(nk));
  for (int b = 0; b < nk; ++b) {
    Eigen::VectorXcd amp(nk);
    for (int i = 0; i < nk; ++i)
      amp(i) = inv * std::polar(1.0, g2.p_band(b) * g2.x(i) / g2.hbar);
    kets.push_back(StateVector{g2, amp});
    K.col(b) = amp;
  }
  Eigen::MatrixXd rates = Eigen::MatrixXd::Identity(nk, nk) / tau;
  const DiscreteKetChannels dchan{kets, rates};
  const DensityMatrix r0 = DensityMatrix::pure(random_state(g2, seed, 17));
  const DensityMatrix rt =
      integrate_lindblad(r0, pot2, cfg2, CollapseChannelSet{dchan}, t_dec);
  const Eigen::MatrixXcd a0 = K.adjoint() * r0.m * K;
  const Eigen::MatrixXcd at = K.adjoint() * rt.m * K;
  const double decay = std::exp(-t_dec / tau);
  double diag_err = 0.0, off_err = 0.0;
  for (int a = 0; a < nk; ++a)
    for (int b = 0; b < nk; ++b) {
      if (a == b)
        diag_err = std::max(diag_err, std::abs(at(a, a) - a0(a, a)));
      else
        off_err = std::max(off_err, std::abs(std::abs(at(a, b)) - std::abs(a0(a, b)) * decay));
    }
  le(*cs, "decoherence_diagonal_drift", diag_err, 1e-10);
  le(*cs, "decoherence_offdiagonal_envelope", off_err, 1e-8);
  (*diag)["decoherence_decay_factor"] = decay;
}

// ------------------------------------------------------------- kernel norm

void scn_kernel_norm(const json& j, Out* out, Checks* cs, json* diag) {
  const PhaseGrid grid = read_grid(j, 64, 32.0);
  const json phys = child(j, "physics");
  const double tau = pos_num(phys, "tau", 1.0);
  const double sigma = pos_num(phys, "sigma", 1.0);
  const double mass = pos_num(phys, "mass", 1.0);
  const double x0 = num(j, "x0", -2.0);
  const double p0 = num(j, "p0", 0.8);
  checked([&] { validate_packet_params(grid, {x0, p0, sigma}); return 0; });
  const json nm = child(j, "numerics");
  const EvolutionConfig cfg{mass, pos_num(nm, "dt", 0.02)};
  const double horizon = pos_num(j, "horizon_tau", 8.0) * tau;
  const int intervals = integer(j, "intervals", 64);
  const int n_walkers = integer(j, "n_walkers", 1500);
  if (intervals < 2 || n_walkers < 1) throw ConfigError("bad quadrature or ensemble size");
  const std::uint64_t seed = u64(j, "seed", 20260819);

  json pots;
  if (j.contains("potentials")) {
    pots = j.at("potentials");
    if (!pots.is_array() || pots.empty())
      throw ConfigError("'potentials' must be a non-empty array");
  } else {
    pots = json::array({json{{"kind", "free"}},
                        json{{"kind", "harmonic"}, {"omega", 0.4}},
                        json{{"kind", "disorder"}, {"strength", 0.3}, {"corr_length", 1.0}}});
  }
  std::vector<Potential> built;
  for (const json& e : pots) {
    Potential p = read_potential(e, grid, mass, mix64(seed + 31 * (built.size() + 1)));
    checked([&] { validate_evolution(grid, p, cfg); return 0; });
    built.push_back(std::move(p));
  }

  if (!out) return;

  const LatticeSpec ref = LatticeSpec::reference(grid, sigma);
  std::vector<double> c_idx, c_norm, c_secs, c_ks, c_crit, c_jumps, c_mean;
  for (std::size_t i = 0; i < built.size(); ++i) {
    const Potential& pot = built[i];
    const std::string kind = str(pots.at(i), "kind", "free");

    const auto t0 = std::chrono::steady_clock::now();
    const double kn =
        kernel_normalization(grid, x0, p0, pot, cfg, tau, ref, horizon, intervals);
    const double secs = seconds_since(t0);
    le(*cs, "kernel_norm_err_" + kind, std::abs(kn - 1.0), 1e-3);
    le(*cs, "kernel_norm_seconds_" + kind, secs, 60.0);

    WalkerRunConfig wr;
    wr.tau = tau;
    wr.sigma = sigma;
    wr.t0 = 0.0;
    wr.t_final = horizon;
    wr.n_walkers = n_walkers;
    wr.base_seed = mix64(seed + 1000003 * (i + 1));
    const StateVector psi0 = make_gaussian_packet(grid, {x0, p0, sigma});
    const WalkerEnsemble ens = run_walkers(psi0, pot, cfg, wr);
    const std::vector<double> wt = waiting_times(ens.walkers);
    const double ks = ks_statistic_exponential(wt, tau);
    const double crit = 1.628 / std::sqrt(static_cast<double>(wt.size()));
    le(*cs, "ks_waiting_" + kind, ks, crit);
    ge(*cs, "ks_jump_count_" + kind, static_cast<double>(wt.size()), 1e4);
    out->events("events_" + kind + ".csv", ens.walkers, kind);

    double mean_wait = 0.0;
    for (double w : wt) mean_wait += w;
    mean_wait /= static_cast<double>(wt.size());
    c_idx.push_back(static_cast<double>(i));
    c_norm.push_back(kn);
    c_secs.push_back(secs);
    c_ks.push_back(ks);
    c_crit.push_back(crit);
    c_jumps.push_back(static_cast<double>(wt.size()));
    c_mean.push_back(mean_wait);
  }

  // survival-weighted source mass: a packet and a two-packet superposition
  const Potential& pot0 = built.front();
  const StateVector a = make_gaussian_packet(grid, {x0, p0, sigma});
  const double sn_a = source_normalization(a, pot0, cfg, tau, ref, horizon, intervals);
  le(*cs, "source_norm_err_packet", std::abs(sn_a - 1.0), 1e-3);
  const StateVector b = make_gaussian_packet(grid, {x0 + 5.0, -p0, sigma});
  StateVector ab{grid, a.amp + b.amp};
  ab.renormalize();
  const double sn_ab = source_normalization(ab, pot0, cfg, tau, ref, horizon, intervals);
  le(*cs, "source_norm_err_superposition", std::abs(sn_ab - 1.0), 1e-3);

  out->series("normalization.csv",
              {"potential_index", "kernel_norm", "seconds", "ks_stat", "ks_critical",
               "jump_count", "mean_wait"},
              {c_idx, c_norm, c_secs, c_ks, c_crit, c_jumps, c_mean});
  (*diag)["horizon"] = horizon;
}

// ----------------------------------------------------- ensemble comparison

void scn_cloud_compare(const json& j, Out* out, Checks* cs, json* diag,
                       bool with_trajectories) {
  const PhaseGrid grid = read_grid(j, 64, 32.0);
  const json phys = child(j, "physics");
  const double tau = pos_num(phys, "tau", 1.0);
  const double sigma = pos_num(phys, "sigma", 2.0);
  const double mass = pos_num(phys, "mass", 1.0);
  const json nm = child(j, "numerics");
  const EvolutionConfig cfg{mass, pos_num(nm, "dt", 0.02)};
  const int n_walkers = integer(j, "n_walkers", 10000);
  const int n_traj = integer(j, "n_trajectories", n_walkers);
  if (n_walkers < 1 || n_traj < 1) throw ConfigError("ensemble sizes must be >= 1");
  const std::uint64_t seed = u64(j, "seed", 20260819);

  std::vector<double> times;
  if (j.contains("sample_times_tau")) {
    for (const json& v : j.at("sample_times_tau")) {
      if (!v.is_number()) throw ConfigError("'sample_times_tau' must hold numbers");
      times.push_back(v.get<double>() * tau);
    }
  } else {
    times = {tau, 3.0 * tau, 5.0 * tau};
  }
  if (times.empty() || !std::is_sorted(times.begin(), times.end()) || times.front() <= 0.0)
    throw ConfigError("'sample_times_tau' must be ascending and positive");

  json pots;
  if (j.contains("potentials")) {
    pots = j.at("potentials");
    if (!pots.is_array() || pots.empty())
      throw ConfigError("'potentials' must be a non-empty array");
  } else {
    // the harmonic frequency matches the packet width (hbar/m sigma^2), so
    // rotation neither breathes the packets nor mixes heated momentum
    // spread into extra cloud area
    pots = json::array({json{{"kind", "free"}, {"x0", 0.0}, {"p0", 0.5}},
                        json{{"kind", "harmonic"}, {"omega", 0.25}, {"x0", -3.0}, {"p0", 0.0}}});
  }
  std::vector<Potential> built;
  for (const json& e : pots) {
    Potential p = read_potential(e, grid, mass, mix64(seed + 97 * (built.size() + 1)));
    checked([&] { validate_evolution(grid, p, cfg); return 0; });
    const double x0 = num(e, "x0", 0.0), p0 = num(e, "p0", 0.0);
    checked([&] { validate_packet_params(grid, {x0, p0, sigma}); return 0; });
    built.push_back(std::move(p));
  }

  if (!out) return;

  const PacketChannel chan(grid, sigma);
  const CollapseChannelSet channels = PhaseSpaceChannels{tau, sigma};
  std::vector<double> r_pot, r_time, r_lw, r_lt, r_wt;
  for (std::size_t i = 0; i < built.size(); ++i) {
    const Potential& pot = built[i];
    const std::string kind = str(pots.at(i), "kind", "free");
    const double x0 = num(pots.at(i), "x0", 0.0), p0 = num(pots.at(i), "p0", 0.0);
    const StateVector psi0 = make_gaussian_packet(grid, {x0, p0, sigma});

    // master equation, observed at the sample times
    std::vector<PhaseSpaceField> lfields;
    DensityMatrix rho = DensityMatrix::pure(psi0);
    double t_cur = 0.0;
    for (double t : times) {
      rho = integrate_lindblad(rho, pot, cfg, channels, t - t_cur);
      t_cur = t;
      lfields.push_back(chan.husimi(rho.m));
    }

    // walker ensemble with in-run sampling
    WalkerRunConfig wr;
    wr.tau = tau;
    wr.sigma = sigma;
    wr.t0 = 0.0;
    wr.t_final = times.back();
    wr.n_walkers = n_walkers;
    wr.base_seed = mix64(seed + 7001 * (i + 1));
    wr.sample_times = times;
    const WalkerEnsemble ens = run_walkers(psi0, pot, cfg, wr);
    out->events("events_" + kind + "_walkers.csv", ens.walkers, kind);

    std::vector<Trajectory> trajs;
    if (with_trajectories) {
      trajs = run_trajectory_ensemble(psi0, pot, cfg, tau, sigma, n_traj, times.back(),
                                      mix64(seed ^ (0x74726a5fULL + 131 * i)));
      out->events("events_" + kind + "_trajectories.csv", trajs, kind);
    }

    for (std::size_t k = 0; k < times.size(); ++k) {
      const std::string tag = kind + "_k" + std::to_string(k);
      const double lw = field_l1_distance(lfields[k], ens.mean_fields[k]);
      le(*cs, "l1_lindblad_walkers_" + tag, lw, 0.05);
      out->field("field_" + tag + "_lindblad.csv", lfields[k]);
      out->field("field_" + tag + "_walkers.csv", ens.mean_fields[k]);
      double lt = 0.0, wt2 = 0.0;
      if (with_trajectories) {
        const EnsembleField ef = ensemble_average(trajs, chan.lattice(), times[k]);
        lt = field_l1_distance(lfields[k], ef.mean);
        wt2 = field_l1_distance(ens.mean_fields[k], ef.mean);
        le(*cs, "l1_lindblad_trajectories_" + tag, lt, 0.05);
        le(*cs, "l1_walkers_trajectories_" + tag, wt2, 0.05);
        out->field("field_" + tag + "_trajectories.csv", ef.mean);
      }
      r_pot.push_back(static_cast<double>(i));
      r_time.push_back(times[k]);
      r_lw.push_back(lw);
      r_lt.push_back(lt);
      r_wt.push_back(wt2);
    }
  }
  out->series("l1_distances.csv",
              {"potential_index", "t", "lindblad_walkers", "lindblad_trajectories",
               "walkers_trajectories"},
              {r_pot, r_time, r_lw, r_lt, r_wt});
  (*diag)["n_walkers"] = n_walkers;
  if (with_trajectories) (*diag)["n_trajectories"] = n_traj;
}

// --------------------------------------------------- classical cloud limit

void scn_liouville(const json& j, Out* out, Checks* cs, json* diag) {
  const PhaseGrid grid = read_grid(j, 128, 40.0);
  const json phys = child(j, "physics");
  const double sigma = pos_num(phys, "sigma", 1.0);
  const double mass = pos_num(phys, "mass", 100.0);
  const double omega = pos_num(j, "omega", 0.005);
  const double r0 = pos_num(j, "orbit_radius", 8.0);
  const double period = 2.0 * kPi / omega;
  const double tau = pos_num(j, "tau_periods", 1.5) * period;
  const int n_samples = integer(j, "n_samples", 10000);
  const int n_points = integer(j, "sample_points", 8);
  const double n_periods = pos_num(j, "periods", 3.0);
  if (n_samples < 2 || n_points < 1) throw ConfigError("bad ensemble or sampling size");
  checked([&] { validate_packet_params(grid, {-r0, 0.0, sigma}); return 0; });
  const json nm = child(j, "numerics");
  const EvolutionConfig cfg{mass, pos_num(nm, "dt", 0.8)};
  const Potential pot = checked([&] { return harmonic_potential(grid, mass, omega); });
  checked([&] { validate_evolution(grid, pot, cfg); return 0; });
  const std::uint64_t seed = u64(j, "seed", 20260819);

  // cheap free-motion control on its own grid
  const json jf = child(j, "free_control");
  const bool free_on = boolean(jf, "enabled", true);
  const PhaseGrid gf = checked([&] {
    return PhaseGrid::make(integer(jf, "n", 64), pos_num(jf, "length", 32.0), grid.hbar);
  });
  const double f_mass = pos_num(jf, "mass", 5.0);
  const double f_p0 = num(jf, "p0", 0.8);
  const double f_sigma = pos_num(jf, "sigma", 1.0);
  const double f_tau = pos_num(jf, "tau", 1.25);
  const double f_horizon = pos_num(jf, "horizon", 4.0);
  const int f_n = integer(jf, "n_samples", 800);
  const EvolutionConfig f_cfg{f_mass, pos_num(jf, "dt", 0.1)};
  const Potential f_pot = free_potential(gf);
  checked([&] { validate_packet_params(gf, {0.0, f_p0, f_sigma}); return 0; });
  checked([&] { validate_evolution(gf, f_pot, f_cfg); return 0; });

  if (!out) return;

  std::vector<double> times;
  for (int k = 1; k <= n_points; ++k)
    times.push_back(n_periods * period * k / static_cast<double>(n_points));
  const StateVector psi0 = make_gaussian_packet(grid, {-r0, 0.0, sigma});
  const CorrespondenceResult res = liouville_correspondence_error(
      psi0, pot, cfg, tau, sigma, n_samples, times, seed, r0, mass * omega * r0);
  le(*cs, "orbit_tracking_error", res.max_normalized, 0.02);
  out->series("correspondence.csv", {"t", "err_x", "err_p"},
              {res.times, res.err_x, res.err_p});
  (*diag)["harmonic_regime_flag"] = res.regime_ok;
  (*diag)["orbit_action_over_hbar"] = mass * omega * r0 * r0 / grid.hbar;

  if (free_on) {
    std::vector<double> ft = {0.25 * f_horizon, 0.625 * f_horizon, f_horizon};
    const StateVector fpsi = make_gaussian_packet(gf, {0.0, f_p0, f_sigma});
    const CorrespondenceResult fres = liouville_correspondence_error(
        fpsi, f_pot, f_cfg, f_tau, f_sigma, f_n, ft, mix64(seed ^ 0x66726565ULL), 4.0,
        2.0);
    le(*cs, "free_tracking_error", fres.max_normalized, 0.15);
    out->series("free_correspondence.csv", {"t", "err_x", "err_p"},
                {fres.times, fres.err_x, fres.err_p});
    (*diag)["free_regime_flag"] = fres.regime_ok;
  }
}

// ------------------------------------------------------- coarse consistency

void scn_coarse(const json& j, Out* out, Checks* cs, json* diag) {
  const PhaseGrid grid = read_grid(j, 64, 32.0);
  const json phys = child(j, "physics");
  const double tau = pos_num(phys, "tau", 1.0);
  const double sigma = pos_num(phys, "sigma", 1.5);
  const double mass = pos_num(phys, "mass", 1.0);
  checked([&] { validate_packet_params(grid, {0.0, 0.0, sigma}); return 0; });
  const json nm = child(j, "numerics");
  const EvolutionConfig cfg{mass, pos_num(nm, "dt", 0.02)};
  const std::uint64_t seed = u64(j, "seed", 20260819);

  const json jr = child(j, "routes");
  const double xi = pos_num(jr, "xi_tau", 0.5) * tau;
  const int s_cell = integer(jr, "cell", 8);
  const int n_quad = integer(jr, "quad_nodes", 8);
  const double x_src = num(jr, "x", -2.0);
  const double p_src = num(jr, "p", 0.5);
  const Potential pot =
      checked([&] { return harmonic_potential(grid, mass, pos_num(jr, "omega", 0.4)); });
  checked([&] { validate_evolution(grid, pot, cfg); return 0; });
  const LatticeSpec fine = LatticeSpec::reference(grid, sigma);
  const CoarseSpec rspec{fine, grid.hbar, s_cell, s_cell, 0.0};
  checked([&] { rspec.validate(grid); return 0; });

  const int shift_cells = integer(j, "identity_shift_cells", 7);
  const Potential potd = checked([&] {
    return disorder_potential(grid, 0.5, 1.0, 0.0, mix64(seed + 3));
  });
  checked([&] { validate_evolution(grid, potd, cfg); return 0; });

  const json jw = child(j, "renewal");
  const PhaseGrid g2 = checked([&] {
    return PhaseGrid::make(integer(jw, "n", 64), pos_num(jw, "length", 32.0), grid.hbar);
  });
  const double m2 = pos_num(jw, "mass", 10.0);
  const double s2 = pos_num(jw, "sigma", 1.0);
  checked([&] { validate_packet_params(g2, {num(jw, "x0", -2.0), 0.0, s2}); return 0; });
  const EvolutionConfig cfg2{m2, pos_num(jw, "dt", 0.1)};
  json jwp = child(jw, "potential");
  if (jwp.empty()) jwp = json{{"kind", "free"}};
  const Potential pot2 = read_potential(jwp, g2, m2, mix64(seed + 11));
  checked([&] { validate_evolution(g2, pot2, cfg2); return 0; });
  const double T = pos_num(jw, "window_tau", 2.0) * tau;
  const int n_windows = integer(jw, "n_windows", 4);
  const int n_walk = integer(jw, "n_walkers", 10000);
  const int sxy = integer(jw, "cell", 8);
  if (n_windows < 1 || n_walk < 1) throw ConfigError("bad renewal sizes");
  const LatticeSpec fine2 = LatticeSpec::reference(g2, s2);
  const CoarseSpec wspec{fine2, g2.hbar, sxy, sxy, T};
  checked([&] { wspec.validate(g2); return 0; });
  const CoarseSpec dspec{fine2, g2.hbar, 1, 1, T};

  if (!out) return;

  // two assemblies of the effective coarse kernel share the shift nodes
  const ShiftQuadrature quad =
      midpoint_shift_quadrature(rspec.delta1(), n_quad, rspec.delta2(), n_quad);
  const PhaseSpaceField ra =
      coarse_kernel_shifted(grid, rspec, x_src, p_src, xi, pot, cfg, tau, quad);
  const PhaseSpaceField rb =
      coarse_kernel_jaynes(grid, rspec, x_src, p_src, xi, pot, cfg, tau, quad);
  const double peak = ra.values.maxCoeff();
  const double route_dev = (ra.values - rb.values).abs().maxCoeff() / peak;
  le(*cs, "route_equivalence_max", route_dev, 1e-8);
  out->field("routes_shifted.csv", ra);
  out->field("routes_jaynes.csv", rb);

  // conjugating the evolution by a lattice translation equals evolving in
  // the index-rotated potential
  const double y = shift_cells * grid.dx;
  const StateVector psi_r = random_state(grid, seed, 99);
  const StateVector lhs = translate_position(
      evolve_unitary(translate_position(psi_r, y), potd, cfg, 20 * cfg.dt), -y);
  Eigen::VectorXd rot(grid.n);
  for (int i = 0; i < grid.n; ++i) rot(i) = potd.values((i + shift_cells) % grid.n);
  const StateVector rhs =
      evolve_unitary(psi_r, custom_potential(grid, rot), cfg, 20 * cfg.dt);
  le(*cs, "shifted_hamiltonian_identity", (lhs.amp - rhs.amp).cwiseAbs().maxCoeff(),
     1e-10);

  // windowed renewal balance of the jump-rate density
  const double t_end = n_windows * T;
  const StateVector psi02 =
      make_gaussian_packet(g2, {num(jw, "x0", -2.0), num(jw, "p0", 0.0), s2});
  WalkerRunConfig wr;
  wr.tau = tau;
  wr.sigma = s2;
  wr.t0 = 0.0;
  wr.t_final = t_end + T;
  wr.n_walkers = n_walk;
  wr.base_seed = mix64(seed + 0x72656e6577ULL);
  const WalkerEnsemble ens = run_walkers(psi02, pot2, cfg2, wr);
  out->events("events_renewal.csv", ens.walkers, "renewal");
  const RenewalCheck rc =
      macro_renewal_residual(ens.walkers, psi02, pot2, cfg2, tau, wspec, 0.0, t_end);
  le(*cs, "renewal_residual_l1", rc.residual_l1, 0.10);
  out->field("renewal_lhs.csv", rc.lhs);
  out->field("renewal_rhs.csv", rc.rhs);

  // one-node cells: same balance at fine resolution, bounded by shot noise
  const RenewalCheck rd =
      macro_renewal_residual(ens.walkers, psi02, pot2, cfg2, tau, dspec, 0.0, t_end);
  const double scale = n_walk * T * rd.lhs.cell_weight();
  double noise = 0.0, total = 0.0;
  for (int c = 0; c < rd.lhs.values.size(); ++c) {
    const double cnt = rd.lhs.values(c) * scale;
    if (cnt > 0.0) {
      noise += std::sqrt(2.0 * cnt / kPi);
      total += cnt;
    }
  }
  const double mc = total > 0.0 ? noise / total : 1.0;
  le(*cs, "renewal_degenerate_l1", rd.residual_l1, 3.0 * mc);
  (*diag)["degenerate_shot_noise_l1"] = mc;
  out->field("renewal_fine_lhs.csv", rd.lhs);
  out->field("renewal_fine_rhs.csv", rd.rhs);

  // how flat the master equation's own rate density is across a cell
  const PacketChannel chan2(g2, s2);
  const CollapseChannelSet ch2 = PhaseSpaceChannels{tau, s2};
  DensityMatrix rho = DensityMatrix::pure(psi02);
  rho = integrate_lindblad(rho, pot2, cfg2, ch2, t_end);
  FieldHistory hist;
  const int hs = 8;
  for (int s = 0; s <= hs; ++s) {
    if (s > 0) rho = integrate_lindblad(rho, pot2, cfg2, ch2, T / hs);
    PhaseSpaceField f = chan2.husimi(rho.m);
    f.values /= tau;
    hist.times.push_back(t_end + s * (T / hs));
    hist.fields.push_back(std::move(f));
  }
  (*diag)["homogeneity_max_deviation"] =
      homogeneity_max_deviation(hist, wspec, t_end);
}

// ------------------------------------------------------------ localization

void scn_localization(const json& j, Out* out, Checks* cs, json* diag) {
  LocalizationConfig L;
  L.grid = read_grid(j, 256, 128.0);
  const json phys = child(j, "physics");
  L.sigma = pos_num(phys, "sigma", 1.25);
  L.mass = pos_num(phys, "mass", 1.0);
  L.tau = pos_num(phys, "tau", 20.0);
  L.p0 = num(j, "p0", 2.2);
  L.strength = num(j, "strength", 0.8);
  if (L.strength < 0.0) throw ConfigError("disorder strength must be >= 0");
  L.corr_length = pos_num(j, "corr_length", 0.75);
  L.carrier = num(j, "carrier", 2.0 * L.p0);
  const json nm = child(j, "numerics");
  L.dt = pos_num(nm, "dt", 0.02);
  L.horizon = pos_num(j, "horizon", 200.0);
  L.n_times = integer(j, "n_times", 25);
  L.n_walkers = integer(j, "n_walkers", 48);
  L.n_disorder_seeds = integer(j, "n_seeds", 8);
  L.base_seed = u64(j, "seed", 20260819);
  L.edge_margin = pos_num(j, "edge_margin", 8.0);
  const double frac = pos_num(j, "slope_window_frac", 0.1);
  if (L.n_walkers < 1 || L.n_disorder_seeds < 1 || L.n_times < 2)
    throw ConfigError("bad localization ensemble sizes");
  if (!(L.horizon >= 5.0 * L.tau))
    throw ConfigError("horizon must be at least 5 tau");
  checked([&] { validate_packet_params(L.grid, {0.0, L.p0, L.sigma}); return 0; });
  checked([&] {
    const Potential probe =
        L.strength > 0.0
            ? disorder_potential(L.grid, L.strength, L.corr_length, L.carrier,
                                 mix64(L.base_seed + 7919))
            : free_potential(L.grid);
    validate_evolution(L.grid, probe, EvolutionConfig{L.mass, L.dt});
    return 0;
  });

  LocalizationConfig S = L;  // short-lifetime control
  const json js = child(j, "short_control");
  S.tau = pos_num(js, "tau", 0.5);
  // frequent collapses heat the momentum spread by hbar^2/(2 sigma^2) per
  // jump; a wider collapse width keeps the heated distribution inside the
  // grid's momentum band (walkers that alias across the band edge would
  // reverse direction and fake sub-classical transport)
  S.sigma = pos_num(js, "sigma", 2.0);
  // classical tracking is a perturbative-scattering statement: the collapse
  // interval must beat the scattering time, and the packet must not sit in
  // a band gap of the modulated disorder. The control therefore runs the
  // same disorder ensemble at a weaker amplitude than the localization leg,
  // where neither condition can hold at any collapse rate.
  S.strength = num(js, "strength", 0.2);
  if (S.strength < 0.0) throw ConfigError("short-control strength must be >= 0");
  // detuned off the Bragg point of the carrier so the packet does not start
  // inside a band gap, where the group velocity is renormalized at any
  // collapse rate
  S.p0 = num(js, "p0", 3.0);
  S.horizon = pos_num(js, "horizon", 8.0);
  S.n_times = integer(js, "n_times", 16);
  S.n_walkers = integer(js, "n_walkers", 2 * L.n_walkers);
  if (S.n_walkers < 1) throw ConfigError("bad short-control ensemble size");
  if (!(S.horizon >= 5.0 * S.tau))
    throw ConfigError("short-control horizon must be at least 5 tau");
  checked([&] { validate_packet_params(S.grid, {0.0, S.p0, S.sigma}); return 0; });

  LocalizationConfig F = S;  // disorder-free sanity run
  const json jz = child(j, "free_control");
  F.strength = 0.0;
  F.horizon = pos_num(jz, "horizon", 8.0);
  F.n_times = integer(jz, "n_times", 16);
  F.n_walkers = integer(jz, "n_walkers", 96);
  F.n_disorder_seeds = 1;
  const bool free_on = boolean(jz, "enabled", true);

  if (!out) return;

  const MsdSeries longr = localization_experiment(L);
  const double sq = late_slope(longr.times, longr.msd_quantum, frac);
  const double sc = late_slope(longr.times, longr.msd_classical, frac);
  le(*cs, "msd_slope_ratio_long_tau", sq / sc, 0.1);
  out->series("msd_long.csv", {"t", "msd_quantum", "msd_classical"},
              {longr.times, longr.msd_quantum, longr.msd_classical});
  (*diag)["long_slope_quantum"] = sq;
  (*diag)["long_slope_classical"] = sc;
  (*diag)["long_n_quantum"] = longr.n_quantum;
  (*diag)["long_aborted_quantum"] = longr.aborted_quantum;
  (*diag)["disorder_seeds"] = longr.disorder_seeds;

  const MsdSeries shortr = localization_experiment(S);
  const std::size_t nt = shortr.times.size();
  double qs = 0.0, csum = 0.0;
  for (std::size_t k = 0; k < nt; ++k) {
    if (shortr.times[k] < 0.7 * S.horizon) continue;
    qs += std::abs(shortr.msd_quantum[k] - shortr.msd_classical[k]);
    csum += shortr.msd_classical[k];
  }
  le(*cs, "short_tau_tracking", qs / csum, 0.20);
  out->series("msd_short.csv", {"t", "msd_quantum", "msd_classical"},
              {shortr.times, shortr.msd_quantum, shortr.msd_classical});
  (*diag)["short_aborted_quantum"] = shortr.aborted_quantum;

  if (free_on) {
    const MsdSeries freer = localization_experiment(F);
    out->series("msd_free.csv", {"t", "msd_quantum", "msd_classical"},
                {freer.times, freer.msd_quantum, freer.msd_classical});
    (*diag)["free_ratio_end"] =
        freer.msd_quantum.back() / freer.msd_classical.back();
  }
}

// ------------------------------------------------------------ packet limit

void scn_exp_s(const json& j, Out* out, Checks* cs, json* diag) {
  const PhaseGrid grid = read_grid(j, 128, 32.0);
  const double boa = pos_num(j, "beta_over_alpha", 0.25);
  const double tau = pos_num(child(j, "physics"), "tau", 1.0);
  std::vector<double> alphas;
  if (j.contains("alphas")) {
    for (const json& v : j.at("alphas")) {
      if (!v.is_number()) throw ConfigError("'alphas' must hold numbers");
      alphas.push_back(v.get<double>());
    }
  } else {
    alphas = {0.5, 1.0, 2.0, 4.0, 8.0};
  }
  if (alphas.size() < 2 || !std::is_sorted(alphas.begin(), alphas.end()) ||
      alphas.front() <= 0.0)
    throw ConfigError("'alphas' must be an ascending positive ladder");
  const int n_levels = integer(j, "spacing_levels", 5);
  if (n_levels < 2) throw ConfigError("spacing_levels must be >= 2");
  for (double a : alphas) {
    const LocalizationOperator op{a, boa * a, 0.0, 0.0};
    checked([&] {
      validate_packet_params(grid, {0.0, 0.0, op.ground_sigma(grid.hbar)});
      return 0;
    });
  }
  const bool gated = boolean(j, "integrate", false);

  if (!out) return;

  const LimitReport rep = limit_convergence(alphas, boa, grid);
  ge(*cs, "eigenvalue_ratio_decreasing", rep.ratios_strictly_decreasing ? 1.0 : 0.0,
     1.0);
  le(*cs, "gaussian_infidelity_top_alpha", 1.0 - rep.gaussian_fidelity.back(), 1e-6);
  double drift = 0.0;
  for (double d : rep.eigenvector_drift) drift = std::max(drift, d);
  le(*cs, "eigenvector_drift_max", drift, 1e-8);
  out->series("limit.csv",
              {"alpha", "eigenvalue_ratio", "gaussian_fidelity", "eigenvector_drift"},
              {rep.alphas, rep.eigenvalue_ratio, rep.gaussian_fidelity,
               rep.eigenvector_drift});

  const double a_mid = alphas[alphas.size() / 2];
  const LocalizationOperator op{a_mid, boa * a_mid, 0.0, 0.0};
  const SOperatorEigs es = solve_S(op, grid);
  const double gap = op.level_spacing(grid.hbar);
  double sp_dev = 0.0;
  std::vector<double> idx, ev;
  for (int n = 0; n < n_levels; ++n) {
    sp_dev = std::max(sp_dev, std::abs((es.values(n + 1) - es.values(n)) - gap) / gap);
    idx.push_back(n);
    ev.push_back(es.values(n));
  }
  le(*cs, "level_spacing_uniformity", sp_dev, 1e-6);
  out->series("spectrum.csv", {"level", "eigenvalue"}, {idx, ev});

  const Eigen::MatrixXcd E = build_exp_S(op, grid);
  le(*cs, "exp_s_hermiticity", (E - E.adjoint()).cwiseAbs().maxCoeff(), 1e-10);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> se(E);
  le(*cs, "exp_s_negative_part", -se.eigenvalues().minCoeff(), 1e-14);

  const LatticeSpec yk = LatticeSpec::reference(grid, op.ground_sigma(grid.hbar));
  const TraceFixing tf = trace_fixing_constant(op, grid, tau, yk);
  le(*cs, "trace_fixing_identity_defect", tf.identity_defect, 1e-10);
  const double g = grid.hbar * std::sqrt(op.alpha * op.beta);
  const double c_closed = 2.0 * std::sinh(2.0 * g) / tau;
  le(*cs, "trace_constant_vs_ladder_sum", std::abs(tf.c - c_closed) / c_closed, 1e-6);
  (*diag)["trace_constant"] = tf.c;

  if (gated) {
    const PhaseGrid g2 = PhaseGrid::make(32, 16.0, grid.hbar);
    const LocalizationOperator op2{1.0, boa, 0.0, 0.0};
    LatticeSpec l2 = LatticeSpec::reference(g2, op2.ground_sigma(g2.hbar));
    l2.dx *= 4;
    l2.nx /= 4;
    l2.dp *= 4;
    l2.np /= 4;
    const DensityMatrix r0 =
        DensityMatrix::pure(make_gaussian_packet(g2, {0.0, 0.0, 1.0}));
    const DensityMatrix rT = integrate_localization_master(
        r0, free_potential(g2), EvolutionConfig{1.0, 0.05}, op2, tau, l2, 0.25);
    (*diag)["gated_master_trace_drift"] = std::abs(rT.trace_real() - 1.0);
  }
}

void dispatch(Scenario s, const json& j, Out* out, Checks* cs, json* diag) {
  switch (s) {
    case Scenario::IdentityChecks: return scn_identity(j, out, cs, diag);
    case Scenario::LindbladVsCtrw: return scn_cloud_compare(j, out, cs, diag, false);
    case Scenario::LindbladVsTrajectories:
      return scn_cloud_compare(j, out, cs, diag, true);
    case Scenario::KernelNormalization: return scn_kernel_norm(j, out, cs, diag);
    case Scenario::LiouvilleCorrespondence: return scn_liouville(j, out, cs, diag);
    case Scenario::CoarseGrainConsistency: return scn_coarse(j, out, cs, diag);
    case Scenario::LocalizationMsd: return scn_localization(j, out, cs, diag);
    case Scenario::ExpSLimit: return scn_exp_s(j, out, cs, diag);
  }
  throw ConfigError("unhandled scenario");
}

}  // namespace

Scenario scenario_from_name(const std::string& name) {
  for (const NamedScenario& ns : kScenarios)
    if (name == ns.name) return ns.s;
  std::string known;
  for (const NamedScenario& ns : kScenarios) {
    if (!known.empty()) known += ", ";
    known += ns.name;
  }
  throw ConfigError("unknown scenario '" + name + "' (known: " + known + ")");
}

const char* scenario_name(Scenario s) {
  for (const NamedScenario& ns : kScenarios)
    if (ns.s == s) return ns.name;
  return "unknown";
}

ScenarioConfig parse_scenario_config(const std::string& json_text) {
  const json j = parse_json_text(json_text);
  if (!j.is_object()) throw ConfigError("config root must be a JSON object");
  if (!j.contains("scenario") || !j.at("scenario").is_string())
    throw ConfigError("config needs a 'scenario' name");
  ScenarioConfig c;
  c.scenario = scenario_from_name(j.at("scenario").get<std::string>());
  c.raw_json = json_text;
  c.out_dir = str(j, "out_dir", "out");
  return c;
}

ScenarioConfig load_scenario_config(const std::string& path) {
  return parse_scenario_config(read_text_file(path));
}

void validate_scenario_config(const ScenarioConfig& cfg) {
  const json j = parse_json_text(cfg.raw_json);
  if (cfg.out_dir.empty()) throw ConfigError("output directory must not be empty");
  dispatch(cfg.scenario, j, nullptr, nullptr, nullptr);
}

ScenarioResult run_scenario(const ScenarioConfig& cfg) {
  const json j = parse_json_text(cfg.raw_json);
  if (cfg.out_dir.empty()) throw ConfigError("output directory must not be empty");
  std::error_code ec;
  std::filesystem::create_directories(cfg.out_dir, ec);
  if (ec) throw ConfigError("cannot create output directory: " + cfg.out_dir);

  Out out{cfg.out_dir, {}};
  Checks cs;
  json diag = json::object();
  const auto t0 = std::chrono::steady_clock::now();
  dispatch(cfg.scenario, j, &out, &cs, &diag);
  const double wall = seconds_since(t0);

  ScenarioResult res;
  res.checks = cs;
  res.wall_seconds = wall;

  json summary;
  summary["scenario"] = scenario_name(cfg.scenario);
  json checks = json::array();
  for (const ScenarioCheck& c : cs)
    checks.push_back(json{{"name", c.name},
                          {"value", c.value},
                          {"tolerance", c.tolerance},
                          {"pass", c.pass}});
  summary["checks"] = checks;
  summary["all_pass"] = res.all_pass();
  summary["diagnostics"] = diag;
  write_text_file(out.path("summary.json"), summary.dump(2) + "\n");
  out.files.push_back("summary.json");

  json manifest;
  manifest["scenario"] = scenario_name(cfg.scenario);
  manifest["version"] = PACKETSIM_VERSION;
  manifest["config"] = j;
  manifest["threads"] = max_threads();
  manifest["wall_seconds"] = wall;
  json files = json::object();
  std::vector<std::string> sorted = out.files;
  std::sort(sorted.begin(), sorted.end());
  for (const std::string& f : sorted) files[f] = file_checksum(out.path(f));
  manifest["files"] = files;
  write_text_file(out.path("manifest.json"), manifest.dump(2) + "\n");

  res.files = out.files;
  return res;
}

std::string emit_report(const std::string& run_dir) {
  json manifest;
  try {
    manifest = parse_json_text(read_text_file(run_dir + "/manifest.json"));
  } catch (const ConfigError&) {
    throw ConfigError("no readable manifest.json under " + run_dir);
  }

  std::ostringstream os;
  os << "scenario: " << manifest.value("scenario", std::string("?")) << "\n";
  os << "version: " << manifest.value("version", std::string("?")) << "\n";
  os << "wall_seconds: " << format_double(manifest.value("wall_seconds", 0.0)) << "\n";

  int bad = 0;
  if (manifest.contains("files") && manifest.at("files").is_object()) {
    for (const auto& item : manifest.at("files").items()) {
      std::string actual;
      try {
        actual = file_checksum(run_dir + "/" + item.key());
      } catch (const ConfigError&) {
        actual = "missing";
      }
      if (actual != item.value().get<std::string>()) {
        ++bad;
        os << "checksum mismatch: " << item.key() << " (" << actual << " vs "
           << item.value().get<std::string>() << ")\n";
      }
    }
  }
  os << "checksums: " << (bad == 0 ? "ok" : "FAILED") << "\n";

  json summary;
  try {
    summary = parse_json_text(read_text_file(run_dir + "/summary.json"));
  } catch (const ConfigError&) {
    os << "summary.json missing\n";
    return os.str();
  }
  char line[160];
  std::snprintf(line, sizeof line, "%-40s %16s %16s %s\n", "check", "value",
                "tolerance", "status");
  os << line;
  for (const json& c : summary.value("checks", json::array())) {
    const std::string val =
        c.at("value").is_number() ? format_double(c.at("value").get<double>()) : "nan";
    const std::string tol = c.at("tolerance").is_number()
                                ? format_double(c.at("tolerance").get<double>())
                                : "nan";
    std::snprintf(line, sizeof line, "%-40s %16s %16s %s\n",
                  c.at("name").get<std::string>().c_str(), val.c_str(), tol.c_str(),
                  c.at("pass").get<bool>() ? "pass" : "FAIL");
    os << line;
  }
  os << "all_pass: " << (summary.value("all_pass", false) ? "true" : "false") << "\n";
  return os.str();
}

}  // namespace packetsim
