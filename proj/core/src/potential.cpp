#include "packetsim/potential.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "packetsim/rng.hpp"

namespace packetsim {

namespace {

// Periodic cubic interpolation through the four nodes around x.
double interp_cubic(const PhaseGrid& grid, const Eigen::VectorXd& v, double x,
                    bool derivative) {
  const double u = (x - grid.x(0)) / grid.dx;
  const double fj = std::floor(u);
  const double t = u - fj;
  const int j = static_cast<int>(fj);
  const int n = grid.n;
  auto at = [&](int k) { return v(((k % n) + n) % n); };
  const double ym1 = at(j - 1), y0 = at(j), y1 = at(j + 1), y2 = at(j + 2);
  // Catmull-Rom coefficients
  const double a = -0.5 * ym1 + 1.5 * y0 - 1.5 * y1 + 0.5 * y2;
  const double b = ym1 - 2.5 * y0 + 2.0 * y1 - 0.5 * y2;
  const double c = 0.5 * (y1 - ym1);
  const double d = y0;
  if (derivative) return ((3.0 * a * t + 2.0 * b) * t + c) / grid.dx;
  return ((a * t + b) * t + c) * t + d;
}

}  // namespace

double Potential::value_at(double x) const {
  switch (kind) {
    case Kind::Free:
      return 0.0;
    case Kind::Harmonic:
      return 0.5 * mass * omega * omega * x * x;
    case Kind::Disorder: {
      const double k0 = 2.0 * kPi / grid.box_length;
      double s = 0.0;
      for (int m = 0; m < coef_cos_.size(); ++m) {
        const double k = k0 * (m + 1);
        s += coef_cos_(m) * std::cos(k * x) + coef_sin_(m) * std::sin(k * x);
      }
      return s;
    }
    case Kind::Custom:
      return interp_cubic(grid, values, x, false);
  }
  return 0.0;
}

double Potential::grad_at(double x) const {
  switch (kind) {
    case Kind::Free:
      return 0.0;
    case Kind::Harmonic:
      return mass * omega * omega * x;
    case Kind::Disorder: {
      const double k0 = 2.0 * kPi / grid.box_length;
      double s = 0.0;
      for (int m = 0; m < coef_cos_.size(); ++m) {
        const double k = k0 * (m + 1);
        s += k * (coef_sin_(m) * std::cos(k * x) - coef_cos_(m) * std::sin(k * x));
      }
      return s;
    }
    case Kind::Custom:
      return interp_cubic(grid, values, x, true);
  }
  return 0.0;
}

Potential free_potential(const PhaseGrid& grid) {
  Potential p;
  p.kind = Potential::Kind::Free;
  p.grid = grid;
  p.values = Eigen::VectorXd::Zero(grid.n);
  return p;
}

Potential harmonic_potential(const PhaseGrid& grid, double mass, double omega) {
  if (!(mass > 0.0) || !(omega > 0.0))
    throw PreconditionError("harmonic potential needs positive mass and omega");
  Potential p;
  p.kind = Potential::Kind::Harmonic;
  p.grid = grid;
  p.mass = mass;
  p.omega = omega;
  p.values.resize(grid.n);
  for (int j = 0; j < grid.n; ++j) p.values(j) = p.value_at(grid.x(j));
  return p;
}

Potential custom_potential(const PhaseGrid& grid, const Eigen::VectorXd& samples) {
  if (samples.size() != grid.n)
    throw PreconditionError("custom potential sample count must match the grid");
  Potential p;
  p.kind = Potential::Kind::Custom;
  p.grid = grid;
  p.values = samples;
  return p;
}

Potential disorder_potential(const PhaseGrid& grid, double strength,
                             double corr_length, std::uint64_t seed) {
  return disorder_potential(grid, strength, corr_length, 0.0, seed);
}

Potential disorder_potential(const PhaseGrid& grid, double strength,
                             double corr_length, double carrier,
                             std::uint64_t seed) {
  if (!(strength >= 0.0)) throw PreconditionError("disorder strength must be >= 0");
  if (!(corr_length > 0.0)) throw PreconditionError("correlation length must be > 0");
  if (!(carrier >= 0.0)) throw PreconditionError("disorder carrier must be >= 0");
  Potential p;
  p.kind = Potential::Kind::Disorder;
  p.grid = grid;
  p.strength = strength;
  p.corr_length = corr_length;
  p.carrier = carrier;
  p.seed = seed;

  const int n_modes = grid.n / 2 - 1;
  const double k0 = 2.0 * kPi / grid.box_length;
  Eigen::VectorXd envelope(n_modes);
  double var_sum = 0.0;
  for (int m = 0; m < n_modes; ++m) {
    const double k = k0 * (m + 1);
    const double dm = (k - carrier) * corr_length;
    const double dp = (k + carrier) * corr_length;
    envelope(m) = std::sqrt(std::exp(-0.5 * dm * dm) + std::exp(-0.5 * dp * dp));
    var_sum += envelope(m) * envelope(m);
  }
  const double amp = var_sum > 0.0 ? strength / std::sqrt(var_sum) : 0.0;

  Rng rng = Rng::stream(seed, 0);
  p.coef_cos_.resize(n_modes);
  p.coef_sin_.resize(n_modes);
  for (int m = 0; m < n_modes; ++m) {
    p.coef_cos_(m) = amp * envelope(m) * rng.normal();
    p.coef_sin_(m) = amp * envelope(m) * rng.normal();
  }

  p.values.resize(grid.n);
  for (int j = 0; j < grid.n; ++j) p.values(j) = p.value_at(grid.x(j));
  return p;
}

void save_potential_table(const std::string& path, const Potential& pot) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open for writing: " + path);
  out.precision(17);
  for (int j = 0; j < pot.grid.n; ++j)
    out << pot.grid.x(j) << ' ' << pot.values(j) << '\n';
  if (!out) throw ConfigError("write failed: " + path);
}

Potential load_potential_table(const std::string& path, const PhaseGrid& grid) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open potential table: " + path);
  Eigen::VectorXd samples(grid.n);
  std::string line;
  int j = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    double x, v;
    if (!(row >> x >> v)) throw ConfigError("malformed potential row: " + line);
    if (j >= grid.n) throw ConfigError("potential table has too many rows");
    if (std::abs(x - grid.x(j)) > 1e-9 * grid.dx)
      throw ConfigError("potential table nodes do not match the grid");
    samples(j++) = v;
  }
  if (j != grid.n) throw ConfigError("potential table has too few rows");
  return custom_potential(grid, samples);
}

}  // namespace packetsim
