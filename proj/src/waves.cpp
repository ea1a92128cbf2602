#include "pwstab/waves.hpp"

#include <Eigen/Dense>
#include <boost/math/tools/toms748_solve.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "pwstab/elliptic.hpp"
#include "pwstab/errors.hpp"

namespace pwstab {
namespace {

constexpr double kRootResidual = 1e-10;
constexpr double kRootDedup = 1e-8;
constexpr double kRelationTol = 1e-8;
constexpr int kNewtonMaxIter = 50;
constexpr double kNewtonTol = 1e-11;
constexpr double kNewtonAccept = 1e-9;
constexpr double kRcondFloor = 1e-14;
constexpr double kLkkStep = 0.01;

double horner(std::span<const double> asc, double x) {
  double v = 0.0;
  for (auto it = asc.rbegin(); it != asc.rend(); ++it) v = v * x + *it;
  return v;
}

double horner_derivative(std::span<const double> asc, double x) {
  double v = 0.0;
  for (std::size_t i = asc.size(); i-- > 1;) v = v * x + static_cast<double>(i) * asc[i];
  return v;
}

void require_grid(int n) {
  if (!is_power_of_two(n) || n < 64) throw DomainError("grid size must be a power of two >= 64");
}

double relative_grid_residual(std::span<const double> r, std::span<const double> f) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t j = 0; j < r.size(); ++j) {
    num += r[j] * r[j];
    den += f[j] * f[j];
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

WaveProfile make_profile(const SystemSpec& system, double length, double speed,
                         const RealVector& reduced, double factor, double mu,
                         double reduced_constant) {
  WaveProfile w{system};
  w.length = length;
  w.speed = speed;
  w.mu = mu;
  w.amplitude_factor = factor;
  w.reduced = reduced;
  w.reduced_constant = reduced_constant;
  w.a1 = factor * reduced_constant;
  w.a2 = mu * w.a1;
  RealVector phi1(reduced.size());
  RealVector phi2(reduced.size());
  for (std::size_t j = 0; j < reduced.size(); ++j) {
    phi1[j] = factor * reduced[j];
    phi2[j] = mu * phi1[j];
  }
  w.values = {std::move(phi1), std::move(phi2)};
  w.coeffs = {forward_fft(w.values[0]), forward_fft(w.values[1])};
  return w;
}

// Newton on the even cosine basis f_j = sum_n w_n a_n cos(2 pi n j / N),
// j, n = 0..N/2, with weights w = (1, 2, ..., 2, 1).
using Nonlinearity = std::function<void(double f, double& value, double& slope)>;

Eigen::MatrixXd cosine_matrix(int n) {
  const int h = n / 2 + 1;
  Eigen::MatrixXd c(h, h);
  for (int j = 0; j < h; ++j) {
    for (int k = 0; k < h; ++k) {
      const double w = (k == 0 || k == n / 2) ? 1.0 : 2.0;
      const long idx = (static_cast<long>(j) * k) % n;
      c(j, k) = w * std::cos(2.0 * std::numbers::pi * static_cast<double>(idx) / n);
    }
  }
  return c;
}

Eigen::VectorXd half_grid_weights(int n) {
  Eigen::VectorXd w = Eigen::VectorXd::Constant(n / 2 + 1, 2.0);
  w(0) = 1.0;
  w(n / 2) = 1.0;
  return w;
}

RealVector unfold_even(const Eigen::VectorXd& half, int n) {
  RealVector full(n);
  for (int j = 0; j <= n / 2; ++j) full[j] = half(j);
  for (int j = n / 2 + 1; j < n; ++j) full[j] = half(n - j);
  return full;
}

EvenNewtonResult newton_even(std::span<const double> symbol, const Nonlinearity& nonlinearity,
                             const RealVector& initial) {
  const int n = static_cast<int>(initial.size());
  const int h = n / 2 + 1;
  const Eigen::MatrixXd c = cosine_matrix(n);
  const Eigen::VectorXd weights = half_grid_weights(n);
  const auto coeffs0 = forward_fft(initial);
  Eigen::VectorXd a(h);
  Eigen::VectorXd m(h);
  for (int k = 0; k < h; ++k) {
    a(k) = coeffs0[k].real();
    m(k) = symbol[k];
  }

  EvenNewtonResult out;
  double previous = std::numeric_limits<double>::infinity();
  for (int iter = 0;; ++iter) {
    const Eigen::VectorXd f = c * a;
    Eigen::VectorXd r = c * m.cwiseProduct(a);
    Eigen::VectorXd slope(h);
    for (int j = 0; j < h; ++j) {
      double value = 0.0;
      double s = 0.0;
      nonlinearity(f(j), value, s);
      r(j) += value;
      slope(j) = s;
    }
    const double fnorm = std::sqrt(weights.dot(f.cwiseAbs2()));
    const double res = std::sqrt(weights.dot(r.cwiseAbs2())) / (fnorm > 0.0 ? fnorm : 1.0);
    if (!std::isfinite(res)) throw ConvergenceError("Newton produced non-finite values", res);
    out.history.push_back(res);
    const bool stalled = res < kNewtonAccept && res > 0.5 * previous;
    if (res < kNewtonTol || stalled) {
      out.values = unfold_even(f, n);
      return out;
    }
    if (iter >= kNewtonMaxIter) {
      throw ConvergenceError("Newton did not converge in 50 iterations", res);
    }
    Eigen::MatrixXd jac = c * m.asDiagonal();
    jac += slope.asDiagonal() * c;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(jac);
    if (lu.rcond() < kRcondFloor) throw SingularityError("Newton Jacobian is numerically singular");
    a -= lu.solve(r);
    previous = res;
  }
}

// f log f^2 = 2 f log|f| avoids the underflow of f * f near f = 0.
double logkdv_rhs(double c, double a, double f) {
  return f == 0.0 ? a : c * f - 2.0 * f * std::log(std::abs(f)) + a;
}

double logkdv_primitive(double c, double a, double f) {
  const double f2 = f * f;
  const double lg = f != 0.0 ? 2.0 * std::log(std::abs(f)) : 0.0;
  return 0.5 * c * f2 - 0.5 * f2 * lg + 0.5 * f2 + a * f;
}

template <class F>
double bracket_root(F f, double lo, double hi) {
  boost::uintmax_t iters = 200;
  auto tol = [](double x, double y) { return std::abs(x - y) <= 1e-15 * std::max(1.0, std::abs(x)); };
  const auto r = boost::math::tools::toms748_solve(f, lo, hi, tol, iters);
  return 0.5 * (r.first + r.second);
}

}  // namespace

double WaveProfile::param(const std::string& key) const {
  auto it = params.find(key);
  if (it == params.end()) throw DomainError("wave has no parameter '" + key + "'");
  return it->second;
}

std::vector<double> real_polynomial_roots(std::span<const double> ascending) {
  std::vector<double> p(ascending.begin(), ascending.end());
  while (!p.empty() && p.back() == 0.0) p.pop_back();
  std::vector<double> roots;
  if (p.empty()) return roots;
  double scale = 0.0;
  for (double v : p) scale = std::max(scale, std::abs(v));

  std::size_t zeros = 0;
  while (zeros < p.size() && p[zeros] == 0.0) ++zeros;
  if (zeros > 0) roots.push_back(0.0);
  std::vector<double> q(p.begin() + static_cast<long>(zeros), p.end());
  const int degree = static_cast<int>(q.size()) - 1;

  std::vector<double> candidates;
  if (degree == 1) {
    candidates.push_back(-q[0] / q[1]);
  } else if (degree > 1) {
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(degree, degree);
    for (int i = 1; i < degree; ++i) companion(i, i - 1) = 1.0;
    for (int i = 0; i < degree; ++i) companion(i, degree - 1) = -q[i] / q[degree];
    Eigen::EigenSolver<Eigen::MatrixXd> es(companion, false);
    for (int i = 0; i < degree; ++i) {
      const auto z = es.eigenvalues()(i);
      if (std::abs(z.imag()) <= 1e-6 * (1.0 + std::abs(z))) candidates.push_back(z.real());
    }
  }
  for (double x : candidates) {
    for (int it = 0; it < 8; ++it) {
      const double d = horner_derivative(p, x);
      if (d == 0.0) break;
      const double step = horner(p, x) / d;
      x -= step;
      if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(x))) break;
    }
    if (std::abs(horner(p, x)) / scale < kRootResidual) roots.push_back(x);
  }
  std::sort(roots.begin(), roots.end());
  std::vector<double> unique;
  for (double r : roots) {
    if (unique.empty() || std::abs(r - unique.back()) > kRootDedup) unique.push_back(r);
  }
  return unique;
}

std::vector<double> coupling_polynomial(SystemKind kind, std::span<const double> c) {
  if (kind == SystemKind::kdv) {
    if (c.size() != 4) throw DomainError("kdv relation needs B1..B4");
    return {-0.5 * c[1], c[0] - 2.0 * c[2], c[1] - c[3], c[2]};
  }
  if (kind == SystemKind::mkdv) {
    if (c.size() != 5) throw DomainError("mkdv relation needs D1..D5");
    return {-c[1] / 3.0, c[0] - c[2], c[1] - 3.0 * c[3], c[2] - c[4], c[3]};
  }
  throw UnsupportedError("coupling relation exists only for kdv and mkdv");
}

CouplingRoots solve_coupling_cubic(SystemKind kind, std::span<const double> coeffs) {
  if (std::all_of(coeffs.begin(), coeffs.end(), [](double v) { return v == 0.0; })) {
    throw DomainError("coupling coefficients are all zero");
  }
  const auto poly = coupling_polynomial(kind, coeffs);
  CouplingRoots out;
  out.all_mu = std::all_of(poly.begin(), poly.end(), [](double v) { return v == 0.0; });
  if (!out.all_mu) out.roots = real_polynomial_roots(poly);
  return out;
}

CouplingRoots solve_coupling_cubic(const SystemSpec& system) {
  return solve_coupling_cubic(system.kind(), system.coefficients());
}

CouplingReduction build_coupling_reduction(const SystemSpec& system, double mu) {
  const auto& c = system.coefficients();
  const auto poly = coupling_polynomial(system.kind(), c);
  double scale = 1.0;
  for (double v : poly) scale = std::max(scale, std::abs(v));
  if (std::abs(horner(poly, mu)) > kRelationTol * scale * std::max(1.0, std::pow(std::abs(mu), 4))) {
    throw ConsistencyError("mu does not satisfy the coupling relation");
  }
  CouplingReduction r;
  r.kind = system.kind();
  r.mu = mu;
  if (system.kind() == SystemKind::kdv) {
    r.scale = 2.0 * (c[0] + c[1] * mu + c[2] * mu * mu);
    if (r.scale == 0.0) throw DomainError("degenerate reduction: xi = 0");
    r.matrix = {(2.0 * c[0] + mu * c[1]) / r.scale, (c[1] + 2.0 * mu * c[2]) / r.scale,
                (2.0 * c[2] + 2.0 * mu * c[3]) / r.scale};
  } else {
    r.scale = 3.0 * (c[0] + c[1] * mu + c[2] * mu * mu + c[3] * mu * mu * mu);
    if (!(r.scale > 0.0)) throw DomainError("mkdv reduction requires zeta > 0");
    r.matrix = {(3.0 * c[0] + 2.0 * mu * c[1] + mu * mu * c[2]) / r.scale,
                (c[1] + 2.0 * mu * c[2] + 3.0 * mu * mu * c[3]) / r.scale,
                (c[2] + 6.0 * mu * c[3] + 3.0 * mu * mu * c[4]) / r.scale};
  }
  r.det = r.matrix.a11 * r.matrix.a22 - r.matrix.a12 * r.matrix.a12;
  return r;
}

CouplingEigen eigen_coupling(const CouplingReduction& reduction) {
  const Sym2& m = reduction.matrix;
  const double angle = 0.5 * std::atan2(2.0 * m.a12, m.a11 - m.a22);
  const double cs = std::cos(angle);
  const double sn = std::sin(angle);
  const double first = m.a11 * cs * cs + 2.0 * m.a12 * sn * cs + m.a22 * sn * sn;
  const double second = m.a11 * sn * sn - 2.0 * m.a12 * sn * cs + m.a22 * cs * cs;
  std::array<double, 2> v1{cs, sn};
  std::array<double, 2> v2{-sn, cs};
  double l1 = first;
  double l2 = second;
  if (std::abs(second - 1.0) < std::abs(first - 1.0)) {
    std::swap(l1, l2);
    std::swap(v1, v2);
  }
  // Orient the unit eigenvector along (1, mu) and keep det O = +1.
  if (v1[0] + reduction.mu * v1[1] < 0.0) v1 = {-v1[0], -v1[1]};
  v2 = {-v1[1], v1[0]};
  CouplingEigen e;
  e.lambda1 = l1;
  e.lambda2 = l2;
  e.o = {{{v1[0], v2[0]}, {v1[1], v2[1]}}};
  e.residual = std::max(std::abs(l1 - 1.0), std::abs(l2 - reduction.det));
  return e;
}

WaveProfile make_wave(const SystemSpec& system, double length, double speed, const Field2& values,
                      double a1, double a2) {
  if (values[0].size() != values[1].size()) throw ShapeError("make_wave: component lengths differ");
  const PeriodicGrid grid(static_cast<int>(values[0].size()), length);
  WaveProfile w{system};
  w.length = grid.length();
  w.speed = speed;
  w.a1 = a1;
  w.a2 = a2;
  w.values = values;
  w.reduced = values[0];
  w.reduced_constant = a1;
  w.coeffs = {forward_fft(values[0]), forward_fft(values[1])};
  return w;
}

double equation_residual(const WaveProfile& wave) {
  const int n = wave.size();
  const auto mphi = apply_multiplier(wave.system.dispersion(wave.length), wave.values);
  RealVector r1(n);
  RealVector r2(n);
  for (int j = 0; j < n; ++j) {
    const auto g = wave.system.gradient(wave.values[0][j], wave.values[1][j]);
    r1[j] = mphi[0][j] + wave.speed * wave.values[0][j] - g[0] + wave.a1;
    r2[j] = mphi[1][j] + wave.speed * wave.values[1][j] - g[1] + wave.a2;
  }
  const double num = std::hypot(l2_norm(r1, wave.length), l2_norm(r2, wave.length));
  const double den = std::hypot(l2_norm(wave.values[0], wave.length),
                                l2_norm(wave.values[1], wave.length));
  return den > 0.0 ? num / den : num;
}

CnoidalData cnoidal_profile(double length, double k, int n) {
  k = EllipticModulus(k).value();
  if (!(length > 0.0)) throw DomainError("period must be positive");
  require_grid(n);
  const double kk = complete_elliptic_k(k);
  const double k2 = k * k;
  const double root = std::sqrt(1.0 - k2 + k2 * k2);
  const double base = 16.0 * kk * kk / (length * length);
  CnoidalData d{RealVector(n), base * root};
  const double offset = base * (root + 1.0 - 2.0 * k2);
  const double amp = 48.0 * kk * kk * k2 / (length * length);
  for (int j = 0; j < n; ++j) {
    const double x = j * length / n;
    const double cn = jacobi_elliptic(2.0 * kk * x / length, k).cn;
    d.values[j] = offset + amp * cn * cn;
  }
  return d;
}

DnoidalData dnoidal_profile(double length, double k, int n) {
  k = EllipticModulus(k).value();
  if (!(length > 0.0)) throw DomainError("period must be positive");
  require_grid(n);
  const double kk = complete_elliptic_k(k);
  const double k2 = k * k;
  const double s = std::sqrt(k2 * k2 - k2 + 1.0);
  const double gamma2 = s + k2 - 1.0;
  const double g = std::sqrt(s - k2 + 0.5);
  const double prefactor = 4.0 * kk / (std::sqrt(2.0) * length * g);
  RealVector f(n);
  for (int j = 0; j < n; ++j) {
    const double x = j * length / n;
    const auto t = jacobi_elliptic(2.0 * kk * x / length, k);
    f[j] = prefactor * t.dn * t.dn / (1.0 + gamma2 * t.sn * t.sn);
  }
  const double l3 = length * length * length;
  const double a = -32.0 * kk * kk * kk / (3.0 * std::sqrt(3.0) * l3) * (s - 2.0 * k2 + 1.0) *
                   std::sqrt(2.0 * s + 2.0 * k2 - 1.0);
  const auto fxx = spectral_derivative(f, length, 2);
  auto residual_for = [&](double c) {
    RealVector r(n);
    for (int j = 0; j < n; ++j) r[j] = -fxx[j] + c * f[j] - 2.0 * f[j] * f[j] * f[j] + a;
    return relative_grid_residual(r, f);
  };
  const double c_k = 16.0 * kk * s / (length * length);
  const double c_k2 = 16.0 * kk * kk * s / (length * length);
  const double res_k = residual_for(c_k);
  const double res_k2 = residual_for(c_k2);
  DnoidalData d{std::move(f), 0.0, a, res_k, res_k2};
  d.speed = d.residual_k2 <= d.residual_k ? c_k2 : c_k;
  return d;
}

WaveProfile build_cnoidal_wave(double length, double k, int n) {
  return build_cnoidal_wave(SystemSpec::kdv({0.5, 0.0, 0.0, 0.0}), 0.0, length, k, n);
}

WaveProfile build_cnoidal_wave(const SystemSpec& system, double mu, double length, double k,
                               int n) {
  if (system.kind() != SystemKind::kdv) throw ConsistencyError("cnoidal waves need a kdv system");
  const auto red = build_coupling_reduction(system, mu);
  const auto d = cnoidal_profile(length, k, n);
  WaveProfile w = make_profile(system, length, d.speed, d.values, 1.0 / red.scale, mu, 0.0);
  w.params = {{"k", k}, {"xi", red.scale}, {"det", red.det}};
  w.residual = equation_residual(w);
  return w;
}

WaveProfile build_dnoidal_wave(double length, double k, int n) {
  return build_dnoidal_wave(SystemSpec::mkdv({2.0, 0.0, 0.0, 0.0, 0.0}), 0.0, length, k, n);
}

WaveProfile build_dnoidal_wave(const SystemSpec& system, double mu, double length, double k,
                               int n) {
  if (system.kind() != SystemKind::mkdv) {
    throw ConsistencyError("dnoidal waves need an mkdv system");
  }
  const auto red = build_coupling_reduction(system, mu);
  const auto d = dnoidal_profile(length, k, n);
  const double best = std::min(d.residual_k, d.residual_k2);
  if (best > 1e-7) {
    throw ConsistencyError("dnoidal profile residual " + std::to_string(best) +
                           " exceeds 1e-7 for both readings of c(k)");
  }
  WaveProfile w =
      make_profile(system, length, d.speed, d.values, std::sqrt(6.0 / red.scale), mu, d.constant);
  w.params = {{"k", k},
              {"zeta", red.scale},
              {"det", red.det},
              {"residual_c_k", d.residual_k},
              {"residual_c_k2", d.residual_k2},
              {"c_reading", d.residual_k2 <= d.residual_k ? 2.0 : 1.0}};
  w.residual = equation_residual(w);
  return w;
}

double logkdv_threshold(double c) { return 2.0 * std::exp(0.5 * c - 1.0); }

std::vector<double> logkdv_equilibria(double c, double a) {
  const double thr = logkdv_threshold(c);
  if (std::abs(std::abs(a) - thr) <= 1e-12 * thr) {
    throw DomainError("(c, A) lies on the threshold |A| = 2 exp(c/2 - 1)");
  }
  const double peak = std::exp(0.5 * (c - 2.0));
  auto g = [&](double f) { return logkdv_rhs(c, a, f); };
  std::vector<double> roots;
  if (a < 0.0 && a > -thr) {
    // g(0+) = A < 0 < g(peak): the saddle lies below the peak.
    roots.push_back(bracket_root(g, std::numeric_limits<double>::min(), peak));
  }
  if (a > -thr) {
    double hi = 2.0 * peak;
    while (g(hi) > 0.0) hi *= 2.0;
    roots.push_back(bracket_root(g, peak, hi));
  }
  return roots;
}

double logkdv_center(double c, double a) {
  const auto roots = logkdv_equilibria(c, a);
  if (roots.empty()) {
    throw UnsupportedError("no positive center for A < -2 exp(c/2 - 1); negative branch unsupported");
  }
  return roots.back();
}

LogKdvOrbit logkdv_orbit(double c, double a, double amplitude) {
  if (!(amplitude > 0.0)) throw DomainError("orbit amplitude must be positive");
  const auto eq = logkdv_equilibria(c, a);
  if (eq.empty()) {
    throw UnsupportedError("no positive center for A < -2 exp(c/2 - 1); negative branch unsupported");
  }
  const double center = eq.back();
  const double lower = eq.size() == 2 ? eq.front() : 0.0;
  const double f_max = center + amplitude;
  const double level = logkdv_primitive(c, a, f_max);
  auto h = [&](double f) { return logkdv_primitive(c, a, f) - level; };
  if (!(h(lower) < 0.0)) {
    throw DomainError("amplitude too large: orbit leaves the period annulus of the center");
  }
  const double f_min = bracket_root(h, std::max(lower, std::numeric_limits<double>::min()), center);

  // f = m + r cos(t) turns the endpoint singularities into a smooth periodic
  // integrand, so the midpoint rule converges spectrally.
  const double mid = 0.5 * (f_max + f_min);
  const double rad = 0.5 * (f_max - f_min);
  constexpr int kNodes = 256;
  double sum = 0.0;
  for (int i = 0; i < kNodes; ++i) {
    const double t = (i + 0.5) * std::numbers::pi / kNodes;
    const double s = std::sin(t);
    const double q = 2.0 * (logkdv_primitive(c, a, mid + rad * std::cos(t)) - level) /
                     (rad * rad * s * s);
    sum += 1.0 / std::sqrt(q);
  }
  return {center, f_max, f_min, 2.0 * sum * std::numbers::pi / kNodes};
}

namespace {

RealVector shoot_logkdv(double c, double a, double f_max, double period, int n) {
  // RK4 on f'' = g(f) from (f_max, 0) over half a period; evenness gives the rest.
  constexpr int kSub = 16;
  const double dx = period / n / kSub;
  auto rhs = [&](double f) { return logkdv_rhs(c, a, f); };
  RealVector half(n / 2 + 1);
  double f = f_max;
  double p = 0.0;
  half[0] = f;
  for (int j = 1; j <= n / 2; ++j) {
    for (int s = 0; s < kSub; ++s) {
      const double k1f = p, k1p = rhs(f);
      const double k2f = p + 0.5 * dx * k1p, k2p = rhs(f + 0.5 * dx * k1f);
      const double k3f = p + 0.5 * dx * k2p, k3p = rhs(f + 0.5 * dx * k2f);
      const double k4f = p + dx * k3p, k4p = rhs(f + dx * k3f);
      f += dx / 6.0 * (k1f + 2.0 * k2f + 2.0 * k3f + k4f);
      p += dx / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
    }
    half[j] = f;
  }
  RealVector full(n);
  for (int j = 0; j <= n / 2; ++j) full[j] = half[j];
  for (int j = n / 2 + 1; j < n; ++j) full[j] = half[n - j];
  return full;
}

}  // namespace

WaveProfile build_logkdv_wave_with_period(double c, double a, double period,
                                          const RealVector& initial) {
  const int n = static_cast<int>(initial.size());
  require_grid(n);
  if (!(period > 0.0)) throw DomainError("period must be positive");
  logkdv_equilibria(c, a);
  const auto symbol = scalar_symbol_values(SymbolMatrix::laplacian(period), n);
  auto nonlinearity = [&](double f, double& value, double& slope) {
    if (!(f > 0.0)) throw ConvergenceError("log-KdV Newton iterate left f > 0", 1.0);
    const double lg = std::log(f * f);
    value = c * f - f * lg + a;
    slope = c - lg - 2.0;
  };
  const auto sol = newton_even(symbol, nonlinearity, initial);
  WaveProfile w = make_profile(SystemSpec::logkdv(), period, c, sol.values, 1.0, 1.0, a);
  w.newton_history = sol.history;
  w.params = {{"c", c}, {"A", a}, {"period", period}, {"center", logkdv_center(c, a)}};
  const auto [lo, hi] = std::minmax_element(sol.values.begin(), sol.values.end());
  w.params["min"] = *lo;
  w.params["max"] = *hi;
  w.params["above_one"] = *lo > 1.0 ? 1.0 : 0.0;
  w.residual = equation_residual(w);
  return w;
}

double logkdv_max_amplitude(double c, double a) {
  const auto eq = logkdv_equilibria(c, a);
  if (eq.empty()) {
    throw UnsupportedError("no positive center for A < -2 exp(c/2 - 1); negative branch unsupported");
  }
  const double center = eq.back();
  const double floor_level = logkdv_primitive(c, a, eq.size() == 2 ? eq.front() : 0.0);
  auto h = [&](double f) { return logkdv_primitive(c, a, f) - floor_level; };
  double hi = 2.0 * center;
  while (h(hi) > 0.0) hi *= 2.0;
  return bracket_root(h, center, hi) - center;
}

double logkdv_amplitude_for_period(double c, double a, double period) {
  if (!(period > 0.0)) throw DomainError("target period must be positive");
  const double amax = logkdv_max_amplitude(c, a);
  // Below 1e-3 amax the quadrature loses the level difference to rounding.
  double lo = 1e-3 * amax;
  double hi = (1.0 - 1e-6) * amax;
  const double p_lo = logkdv_orbit(c, a, lo).period - period;
  const double p_hi = logkdv_orbit(c, a, hi).period - period;
  if (p_lo * p_hi > 0.0) {
    throw DomainError("target period outside the attainable range [" +
                      std::to_string(p_lo + period) + ", " + std::to_string(p_hi + period) + "]");
  }
  const bool rising = p_hi > p_lo;
  for (int i = 0; i < 200 && hi - lo > 1e-14 * amax; ++i) {
    const double mid = 0.5 * (lo + hi);
    const bool above = logkdv_orbit(c, a, mid).period > period;
    (above == rising ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<PhaseOrbit> logkdv_phase_portrait(double c, double a, int count, int samples) {
  if (count < 1 || samples < 2) throw DomainError("phase portrait needs count >= 1 and samples >= 2");
  std::vector<PhaseOrbit> out;
  for (double f : logkdv_equilibria(c, a)) {
    const double level = -logkdv_primitive(c, a, f);
    out.push_back({"equilibrium", level, f, f, 0.0, {{f, 0.0}}});
  }
  const double amax = logkdv_max_amplitude(c, a);
  constexpr int kSub = 32;
  for (int i = 1; i <= count; ++i) {
    const double amp = amax * i / (count + 1.0);
    const auto orbit = logkdv_orbit(c, a, amp);
    PhaseOrbit po{"orbit", -logkdv_primitive(c, a, orbit.f_max), orbit.f_min, orbit.f_max,
                  orbit.period, {}};
    const double dx = orbit.period / samples / kSub;
    double f = orbit.f_max;
    double p = 0.0;
    auto rhs = [&](double v) { return logkdv_rhs(c, a, v); };
    po.points.push_back({f, p});
    for (int j = 1; j <= samples; ++j) {
      for (int s = 0; s < kSub; ++s) {
        const double k1f = p, k1p = rhs(f);
        const double k2f = p + 0.5 * dx * k1p, k2p = rhs(f + 0.5 * dx * k1f);
        const double k3f = p + 0.5 * dx * k2p, k3p = rhs(f + 0.5 * dx * k2f);
        const double k4f = p + dx * k3p, k4p = rhs(f + dx * k3f);
        f += dx / 6.0 * (k1f + 2.0 * k2f + 2.0 * k3f + k4f);
        p += dx / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
      }
      po.points.push_back({f, p});
    }
    out.push_back(std::move(po));
  }
  return out;
}

WaveProfile build_logkdv_wave(double c, double a, int n, double amplitude) {
  require_grid(n);
  const auto orbit = logkdv_orbit(c, a, amplitude);
  const auto guess = shoot_logkdv(c, a, orbit.f_max, orbit.period, n);
  WaveProfile w = build_logkdv_wave_with_period(c, a, orbit.period, guess);
  w.params["amplitude"] = amplitude;
  return w;
}

WaveProfile build_bo_wave(double omega, double length, int n) {
  require_grid(n);
  if (!(length > 0.0)) throw DomainError("period must be positive");
  const double ratio = 2.0 * std::numbers::pi / (omega * length);
  if (!(omega > 0.0) || !(ratio < 1.0)) throw DomainError("BO wave requires omega > 2 pi / L");
  const double gamma = std::atanh(ratio);
  RealVector f(n);
  for (int j = 0; j < n; ++j) {
    const double x = j * length / n;
    f[j] = 4.0 * std::numbers::pi / length * std::sinh(gamma) /
           (std::cosh(gamma) - std::cos(2.0 * std::numbers::pi * x / length));
  }
  WaveProfile w = make_profile(SystemSpec::lkk(0.0), length, omega, f, 1.0, 1.0, 0.0);
  w.params = {{"omega", omega}, {"W", 0.0}, {"gamma", gamma}};
  w.residual = equation_residual(w);
  return w;
}

WaveProfile continue_lkk_wave(double omega, double w, const WaveProfile& initial) {
  if (initial.system.kind() != SystemKind::lkk) {
    throw ConsistencyError("continuation needs an lkk wave as starting point");
  }
  if (w < 0.0 || !std::isfinite(w)) throw DomainError("W must be >= 0");
  const int n = initial.size();
  const double w0 = initial.system.depth_inverse();
  const double omega0 = initial.speed;
  const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(w - w0) / kLkkStep - 1e-12)));
  RealVector f = initial.values[0];
  std::vector<double> history;
  for (int s = 1; s <= steps; ++s) {
    const double t = static_cast<double>(s) / steps;
    const double ws = w0 + t * (w - w0);
    const double om = omega0 + t * (omega - omega0);
    const auto symbol = scalar_symbol_values(SymbolMatrix::theta(ws, initial.length), n);
    auto nonlinearity = [om](double v, double& value, double& slope) {
      value = om * v - 0.5 * v * v;
      slope = om - v;
    };
    auto sol = newton_even(symbol, nonlinearity, f);
    f = std::move(sol.values);
    history = std::move(sol.history);
  }
  WaveProfile out = make_profile(SystemSpec::lkk(w), initial.length, omega, f, 1.0, 1.0, 0.0);
  out.newton_history = history;
  out.params = {{"omega", omega}, {"W", w}, {"continuation_steps", static_cast<double>(steps)}};
  out.residual = equation_residual(out);
  return out;
}

RealVector solve_even(std::span<const double> symbol, std::span<const double> potential,
                      std::span<const double> rhs) {
  const int n = static_cast<int>(rhs.size());
  if (static_cast<int>(potential.size()) != n || static_cast<int>(symbol.size()) != n / 2 + 1) {
    throw ShapeError("solve_even: inconsistent sizes");
  }
  const int h = n / 2 + 1;
  const Eigen::MatrixXd c = cosine_matrix(n);
  Eigen::MatrixXd jac(h, h);
  Eigen::VectorXd b(h);
  for (int j = 0; j < h; ++j) {
    for (int k = 0; k < h; ++k) jac(j, k) = c(j, k) * (symbol[k] + potential[j]);
    b(j) = rhs[j];
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(jac);
  if (lu.rcond() < kRcondFloor) throw SingularityError("even-subspace operator is singular");
  const Eigen::VectorXd a = lu.solve(b);
  return unfold_even(c * a, n);
}

}  // namespace pwstab
