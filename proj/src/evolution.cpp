#include "pwstab/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <random>

#include "pwstab/errors.hpp"

namespace pwstab {
namespace {

constexpr int kContourPoints = 64;
constexpr double kPositivityFloor = 1e-8;
constexpr double kGolden = 0.6180339887498949;

double sobolev_weight(double xi, double s) { return std::pow(1.0 + xi * xi, 0.5 * s); }

// Weighted squared norm of a real signal from its N/2 + 1 coefficients.
template <class Coeff>
double weighted_norm2(const PeriodicGrid& grid, double s, Coeff coeff) {
  const int n = grid.size();
  double sum = 0.0;
  for (int k = 0; k <= n / 2; ++k) {
    const double mult = (k == 0 || k == n / 2) ? 1.0 : 2.0;
    sum += mult * sobolev_weight(grid.frequency(k), s) * std::norm(coeff(k));
  }
  return sum * grid.length();
}

Matrix2 symmetric_basis(const Sym2& m, std::array<double, 2>& lambda) {
  const double angle = 0.5 * std::atan2(2.0 * m.a12, m.a11 - m.a22);
  const double cs = std::cos(angle);
  const double sn = std::sin(angle);
  lambda = {m.a11 * cs * cs + 2.0 * m.a12 * sn * cs + m.a22 * sn * sn,
            m.a11 * sn * sn - 2.0 * m.a12 * sn * cs + m.a22 * cs * cs};
  return {{{cs, -sn}, {sn, cs}}};
}

}  // namespace

Invariants conserved_quantities(const Field2& u, const SystemSpec& system, double length) {
  const int n = static_cast<int>(u[0].size());
  if (u[1].size() != u[0].size()) throw ShapeError("conserved_quantities: component lengths differ");
  const PeriodicGrid grid(n, length);
  const auto symbol = system.dispersion(length);
  const auto c1 = forward_fft(u[0]);
  const auto c2 = forward_fft(u[1]);
  double quad = 0.0;
  for (int k = 0; k <= n / 2; ++k) {
    const double mult = (k == 0 || k == n / 2) ? 1.0 : 2.0;
    const Sym2 m = symbol.evaluate(k, n);
    const Complex v = m.a11 * c1[k] + m.a12 * c2[k];
    const Complex w = m.a12 * c1[k] + m.a22 * c2[k];
    quad += mult * (std::conj(c1[k]) * v + std::conj(c2[k]) * w).real();
  }
  quad *= length;
  double potential = 0.0;
  double sq = 0.0;
  double sum = 0.0;
  for (int j = 0; j < n; ++j) {
    potential += system.potential(u[0][j], u[1][j]);
    sq += u[0][j] * u[0][j] + u[1][j] * u[1][j];
    sum += u[0][j] + u[1][j];
  }
  const double h = grid.spacing();
  return {0.5 * quad - potential * h, 0.5 * sq * h, sum * h};
}

double energy_norm(const Field2& u, double s, double length) {
  const PeriodicGrid grid(static_cast<int>(u[0].size()), length);
  double total = 0.0;
  for (const auto& comp : u) {
    const auto c = forward_fft(comp);
    total += weighted_norm2(grid, s, [&](int k) { return c[k]; });
  }
  return std::sqrt(total);
}

OrbitalFit orbital_fit(const Field2& u, const Field2& v, double s, double length) {
  const int n = static_cast<int>(u[0].size());
  for (int c = 0; c < 2; ++c) {
    if (u[c].size() != static_cast<std::size_t>(n) || v[c].size() != static_cast<std::size_t>(n)) {
      throw ShapeError("orbital_distance: grids do not match");
    }
  }
  const PeriodicGrid grid(n, length);
  const std::array<ComplexVector, 2> cu = {forward_fft(u[0]), forward_fft(u[1])};
  const std::array<ComplexVector, 2> cv = {forward_fft(v[0]), forward_fft(v[1])};

  auto distance = [&](double y) {
    double total = 0.0;
    for (int c = 0; c < 2; ++c) {
      total += weighted_norm2(grid, s, [&](int k) {
        const double phase = grid.frequency(k) * y;
        const Complex shift = (k == n / 2) ? Complex(std::cos(phase), 0.0) : std::polar(1.0, phase);
        return cu[c][k] - cv[c][k] * shift;
      });
    }
    return std::sqrt(std::max(total, 0.0));
  };

  // Cross-correlation sum_k w_k conj(u_k) v_k e^{i xi_k y} at the N grid shifts.
  ComplexVector corr(n / 2 + 1);
  for (int k = 0; k <= n / 2; ++k) {
    const double w = sobolev_weight(grid.frequency(k), s);
    corr[k] = w * (std::conj(cu[0][k]) * cv[0][k] + std::conj(cu[1][k]) * cv[1][k]);
  }
  const RealVector scan = inverse_fft(corr, n);
  const int best = static_cast<int>(std::max_element(scan.begin(), scan.end()) - scan.begin());

  const double h = grid.spacing();
  double lo = grid.point(best) - h;
  double hi = grid.point(best) + h;
  double x1 = hi - kGolden * (hi - lo);
  double x2 = lo + kGolden * (hi - lo);
  double f1 = distance(x1);
  double f2 = distance(x2);
  while (hi - lo > 1e-14 * std::max(1.0, length)) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kGolden * (hi - lo);
      f1 = distance(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kGolden * (hi - lo);
      f2 = distance(x2);
    }
  }
  OrbitalFit fit{f1 <= f2 ? f1 : f2, f1 <= f2 ? x1 : x2};
  const double grid_value = distance(grid.point(best));
  if (grid_value < fit.distance) fit = {grid_value, grid.point(best)};
  fit.shift = std::fmod(std::fmod(fit.shift, length) + length, length);
  return fit;
}

double orbital_distance(const Field2& u, const Field2& v, double s, double length) {
  return orbital_fit(u, v, s, length).distance;
}

double linear_stiffness(const SystemSpec& system, double length, int n) {
  const auto symbol = system.dispersion(length);
  const PeriodicGrid grid(n, length);
  double rate = 0.0;
  for (int k = 0; k <= n / 2; ++k) {
    const auto ev = symbol.evaluate(k, n).eigenvalues();
    const double big = std::max(std::abs(ev[0]), std::abs(ev[1]));
    rate = std::max(rate, std::abs(grid.frequency(k)) * big);
  }
  return rate;
}

void check_time_step(const SystemSpec& system, double length, int n, double dt, double cfl) {
  if (!(dt != 0.0) || !std::isfinite(dt)) throw DomainError("time step must be finite and nonzero");
  if (!(cfl > 0.0)) throw DomainError("CFL constant must be positive");
  const double bound = cfl / linear_stiffness(system, length, n);
  if (std::abs(dt) > bound) {
    throw DomainError("time step " + std::to_string(dt) + " violates the bound dt <= " +
                      std::to_string(bound));
  }
}

Etdrk4::Etdrk4(const SystemSpec& system, double length, int n, double dt)
    : system_(system), length_(length), n_(n), dt_(dt) {
  const PeriodicGrid grid(n, length);
  if (!(dt != 0.0) || !std::isfinite(dt)) throw DomainError("time step must be finite and nonzero");
  const auto symbol = system.dispersion(length);
  const Complex iu(0.0, 1.0);
  std::array<Complex, kContourPoints> roots;
  for (int j = 0; j < kContourPoints; ++j) {
    roots[j] = std::polar(1.0, 2.0 * std::numbers::pi * (j + 0.5) / kContourPoints);
  }
  modes_.resize(n / 2 + 1);
  for (int k = 0; k <= n / 2; ++k) {
    Mode& md = modes_[k];
    const bool nyquist = k == n / 2;
    const double xi = nyquist ? 0.0 : grid.frequency(k);
    std::array<double, 2> lambda{};
    md.basis = symmetric_basis(symbol.evaluate(k, n), lambda);
    md.keep = 3 * k <= n;
    md.derivative = md.keep && !nyquist ? -iu * xi : Complex(0.0);
    for (int c = 0; c < 2; ++c) {
      const Complex lh = iu * xi * lambda[c] * dt;
      md.e[c] = std::exp(lh);
      md.e2[c] = std::exp(0.5 * lh);
      Complex q = 0.0, f1 = 0.0, f2 = 0.0, f3 = 0.0;
      for (const Complex& r : roots) {
        const Complex z = lh + r;
        const Complex ez = std::exp(z);
        const Complex z3 = z * z * z;
        q += (std::exp(0.5 * z) - 1.0) / z;
        f1 += (-4.0 - z + ez * (4.0 - 3.0 * z + z * z)) / z3;
        f2 += (2.0 + z + ez * (z - 2.0)) / z3;
        f3 += (-4.0 - 3.0 * z - z * z + ez * (4.0 - z)) / z3;
      }
      const double scale = dt / kContourPoints;
      md.q[c] = q * scale;
      md.f1[c] = f1 * scale;
      md.f2[c] = f2 * scale;
      md.f3[c] = f3 * scale;
    }
  }
}

Etdrk4::Spectrum Etdrk4::nonlinear(const Spectrum& w) const {
  const int h = n_ / 2 + 1;
  ComplexVector c1(h), c2(h);
  for (int k = 0; k < h; ++k) {
    const Mode& md = modes_[k];
    if (!md.keep) continue;
    c1[k] = md.basis[0][0] * w[0][k] + md.basis[0][1] * w[1][k];
    c2[k] = md.basis[1][0] * w[0][k] + md.basis[1][1] * w[1][k];
  }
  const RealVector u1 = inverse_fft(c1, n_);
  const RealVector u2 = inverse_fft(c2, n_);
  if (system_.kind() == SystemKind::logkdv) {
    const double lowest = std::min(*std::min_element(u1.begin(), u1.end()),
                                   *std::min_element(u2.begin(), u2.end()));
    if (lowest < kPositivityFloor) throw DomainError("log-KdV state lost positivity");
  }
  RealVector g1(n_), g2(n_);
  for (int j = 0; j < n_; ++j) {
    const auto g = system_.gradient(u1[j], u2[j]);
    g1[j] = g[0];
    g2[j] = g[1];
  }
  const auto n1 = forward_fft(g1);
  const auto n2 = forward_fft(g2);
  Spectrum out{ComplexVector(h), ComplexVector(h)};
  for (int k = 0; k < h; ++k) {
    const Mode& md = modes_[k];
    const Complex a = md.derivative * n1[k];
    const Complex b = md.derivative * n2[k];
    out[0][k] = md.basis[0][0] * a + md.basis[1][0] * b;
    out[1][k] = md.basis[0][1] * a + md.basis[1][1] * b;
  }
  return out;
}

void Etdrk4::step(Field2& u) const {
  if (static_cast<int>(u[0].size()) != n_ || static_cast<int>(u[1].size()) != n_) {
    throw ShapeError("state does not match the integrator grid");
  }
  const int h = n_ / 2 + 1;
  const auto c1 = forward_fft(u[0]);
  const auto c2 = forward_fft(u[1]);
  Spectrum v{ComplexVector(h), ComplexVector(h)};
  for (int k = 0; k < h; ++k) {
    const Matrix2& b = modes_[k].basis;
    v[0][k] = b[0][0] * c1[k] + b[1][0] * c2[k];
    v[1][k] = b[0][1] * c1[k] + b[1][1] * c2[k];
  }
  const Spectrum nv = nonlinear(v);
  Spectrum a = v;
  for (int c = 0; c < 2; ++c) {
    for (int k = 0; k < h; ++k) a[c][k] = modes_[k].e2[c] * v[c][k] + modes_[k].q[c] * nv[c][k];
  }
  const Spectrum na = nonlinear(a);
  Spectrum b = v;
  for (int c = 0; c < 2; ++c) {
    for (int k = 0; k < h; ++k) b[c][k] = modes_[k].e2[c] * v[c][k] + modes_[k].q[c] * na[c][k];
  }
  const Spectrum nb = nonlinear(b);
  Spectrum cst = v;
  for (int c = 0; c < 2; ++c) {
    for (int k = 0; k < h; ++k) {
      cst[c][k] = modes_[k].e2[c] * a[c][k] + modes_[k].q[c] * (2.0 * nb[c][k] - nv[c][k]);
    }
  }
  const Spectrum nc = nonlinear(cst);
  ComplexVector o1(h), o2(h);
  for (int k = 0; k < h; ++k) {
    const Mode& md = modes_[k];
    std::array<Complex, 2> next{};
    for (int c = 0; c < 2; ++c) {
      next[c] = md.e[c] * v[c][k] + md.f1[c] * nv[c][k] +
                2.0 * md.f2[c] * (na[c][k] + nb[c][k]) + md.f3[c] * nc[c][k];
    }
    o1[k] = md.basis[0][0] * next[0] + md.basis[0][1] * next[1];
    o2[k] = md.basis[1][0] * next[0] + md.basis[1][1] * next[1];
  }
  o1[0].imag(0.0);
  o2[0].imag(0.0);
  u = {inverse_fft(o1, n_), inverse_fft(o2, n_)};
}

void step_etdrk4(SimulationState& state, const Etdrk4& integrator) {
  Field2 next = state.u;
  integrator.step(next);
  for (const auto& comp : next) {
    for (double v : comp) {
      if (!std::isfinite(v)) throw BlowUpError("non-finite state after time step", state.t);
    }
  }
  state.u = std::move(next);
  state.t += integrator.dt();
}

Field2 band_limited_perturbation(int n, double length, double s, std::uint64_t seed) {
  const PeriodicGrid grid(n, length);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Field2 p;
  for (int c = 0; c < 2; ++c) {
    ComplexVector coeffs(n / 2 + 1);
    for (int k = 1; k <= n / 8; ++k) coeffs[k] = Complex(normal(rng), normal(rng));
    p[c] = inverse_fft(coeffs, n);
  }
  const double norm = energy_norm(p, s, length);
  for (auto& comp : p) {
    for (double& v : comp) v /= norm;
  }
  return p;
}

StabilityResult stability_experiment(const WaveProfile& wave, const StabilityConfig& config) {
  if (!(config.delta >= 0.0)) throw DomainError("perturbation size must be >= 0");
  if (!(config.horizon > 0.0)) throw DomainError("horizon must be positive");
  if (config.record_every < 1) throw DomainError("record_every must be >= 1");
  const int n = wave.size();
  const double len = wave.length;
  const double s = wave.system.sobolev_index();
  check_time_step(wave.system, len, n, config.dt, config.cfl);

  SimulationState state;
  state.dt = config.dt;
  state.u = wave.values;
  if (config.delta > 0.0) {
    const auto p = band_limited_perturbation(n, len, s, config.seed);
    for (int c = 0; c < 2; ++c) {
      for (int j = 0; j < n; ++j) state.u[c][j] += config.delta * p[c][j];
    }
  }
  const Etdrk4 integrator(wave.system, len, n, config.dt);
  auto record = [&] {
    const auto inv = conserved_quantities(state.u, wave.system, len);
    state.history.push_back(
        {state.t, inv.energy, inv.momentum, inv.mass, orbital_distance(state.u, wave.values, s, len)});
  };

  StabilityResult result;
  const long steps = std::lround(config.horizon / config.dt);
  try {
    record();
    for (long i = 1; i <= steps; ++i) {
      step_etdrk4(state, integrator);
      if (i % config.record_every == 0 || i == steps) record();
    }
  } catch (const BlowUpError& e) {
    result.blew_up = true;
    result.last_valid_time = e.last_valid_time();
    result.message = e.what();
  } catch (const DomainError& e) {
    result.blew_up = true;
    result.last_valid_time = state.t;
    result.message = e.what();
  }
  if (!result.blew_up) result.last_valid_time = state.t;
  result.history = std::move(state.history);
  result.final_state = std::move(state.u);
  const HistoryRow& first = result.history.front();
  auto rel = [](double v, double ref) { return std::abs(v - ref) / std::max(std::abs(ref), 1e-300); };
  for (const auto& row : result.history) {
    result.max_rho = std::max(result.max_rho, row.rho);
    result.drift_energy = std::max(result.drift_energy, rel(row.energy, first.energy));
    result.drift_momentum = std::max(result.drift_momentum, rel(row.momentum, first.momentum));
    result.drift_mass = std::max(result.drift_mass, rel(row.mass, first.mass));
  }
  const double bound = config.delta > 0.0 ? config.k_ratio * config.delta : 1e-5;
  result.bounded = !result.blew_up && result.max_rho <= bound;
  return result;
}

void write_history_csv(const std::vector<HistoryRow>& history, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DomainError("cannot open " + path + " for writing");
  out << "t,E,F,M,rho\n" << std::setprecision(17);
  for (const auto& r : history) {
    out << r.t << ',' << r.energy << ',' << r.momentum << ',' << r.mass << ',' << r.rho << '\n';
  }
}

}  // namespace pwstab
