#include "pwstab/symbols.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "pwstab/errors.hpp"

namespace pwstab {
namespace {

constexpr double kSeriesCutoff = 1e-3;
constexpr double kOverflowClamp = 700.0;

// t coth t and t / sinh t, both even with value 1 at t = 0.
double t_coth_t(double t) {
  t = std::abs(t);
  if (t < kSeriesCutoff) {
    const double t2 = t * t;
    return 1.0 + t2 / 3.0 - t2 * t2 / 45.0 + 2.0 * t2 * t2 * t2 / 945.0;
  }
  return t / std::tanh(t);
}

double t_over_sinh_t(double t) {
  t = std::abs(t);
  if (t < kSeriesCutoff) {
    const double t2 = t * t;
    return 1.0 - t2 / 6.0 + 7.0 * t2 * t2 / 360.0 - 31.0 * t2 * t2 * t2 / 15120.0;
  }
  return t / std::sinh(t);
}

Sym2 lkk_entries(double xi, double w) {
  if (w == 0.0) return {std::abs(xi), 0.0, std::abs(xi)};
  const double t = xi / w;
  if (std::abs(t) > kOverflowClamp) {
    const double diag = std::abs(xi) - w;
    return {diag, 0.0, diag};
  }
  const double diag = w * t_coth_t(t) - w;
  return {diag, -w * t_over_sinh_t(t), diag};
}

}  // namespace

std::array<double, 2> Sym2::eigenvalues() const {
  const double mean = 0.5 * (a11 + a22);
  const double radius = std::hypot(0.5 * (a11 - a22), a12);
  return {mean - radius, mean + radius};
}

std::string_view to_string(SymbolKind kind) {
  switch (kind) {
    case SymbolKind::laplacian: return "laplacian";
    case SymbolKind::lkk: return "lkk";
    case SymbolKind::theta: return "theta";
    case SymbolKind::bo: return "bo";
  }
  return "unknown";
}

double theta_symbol(double xi, double w) {
  if (w < 0.0 || !std::isfinite(w)) throw DomainError("theta_symbol: W must be >= 0");
  const Sym2 m = lkk_entries(xi, w);
  return m.a11 + m.a12;
}

SymbolMatrix::SymbolMatrix(SymbolKind kind, double w, double length)
    : kind_(kind), w_(w), length_(length) {
  if (!(length > 0.0)) throw DomainError("symbol length scale must be positive");
  if (w < 0.0 || !std::isfinite(w)) throw DomainError("symbol parameter W must be >= 0");
}

SymbolMatrix SymbolMatrix::laplacian(double length) {
  return {SymbolKind::laplacian, 0.0, length};
}
SymbolMatrix SymbolMatrix::lkk(double w, double length) { return {SymbolKind::lkk, w, length}; }
SymbolMatrix SymbolMatrix::theta(double w, double length) {
  return {SymbolKind::theta, w, length};
}
SymbolMatrix SymbolMatrix::bo(double length) { return {SymbolKind::bo, 0.0, length}; }

SymbolMatrix SymbolMatrix::with_shift(double sigma) const {
  SymbolMatrix copy = *this;
  copy.shift_ = sigma;
  return copy;
}

Sym2 SymbolMatrix::evaluate(int kappa, int n) const {
  if (std::abs(kappa) > n / 2) throw DomainError("symbol evaluated outside the truncated lattice");
  return at_frequency(2.0 * std::numbers::pi * kappa / length_);
}

Sym2 SymbolMatrix::at_frequency(double xi) const {
  Sym2 m;
  switch (kind_) {
    case SymbolKind::laplacian:
      m = {xi * xi, 0.0, xi * xi};
      break;
    case SymbolKind::lkk:
      m = lkk_entries(xi, w_);
      break;
    case SymbolKind::theta: {
      const double v = theta_symbol(xi, w_);
      m = {v, 0.0, v};
      break;
    }
    case SymbolKind::bo:
      m = {std::abs(xi), 0.0, std::abs(xi)};
      break;
  }
  m.a11 += shift_;
  m.a22 += shift_;
  return m;
}

RealVector scalar_symbol_values(const SymbolMatrix& symbol, int n) {
  RealVector m(n / 2 + 1);
  for (int k = 0; k <= n / 2; ++k) m[k] = symbol.evaluate(k, n).a11;
  return m;
}

RealVector apply_scalar_multiplier(const SymbolMatrix& symbol, std::span<const double> u) {
  const int n = static_cast<int>(u.size());
  auto coeffs = forward_fft(u);
  for (int k = 0; k <= n / 2; ++k) coeffs[k] *= symbol.evaluate(k, n).a11;
  return inverse_fft(coeffs, n);
}

Field2 apply_multiplier(const SymbolMatrix& symbol, const Field2& u) {
  const int n = static_cast<int>(u[0].size());
  if (u[1].size() != u[0].size()) throw ShapeError("apply_multiplier: component lengths differ");
  auto c1 = forward_fft(u[0]);
  auto c2 = forward_fft(u[1]);
  for (int k = 0; k <= n / 2; ++k) {
    const Sym2 m = symbol.evaluate(k, n);
    const Complex v1 = c1[k];
    const Complex v2 = c2[k];
    c1[k] = m.a11 * v1 + m.a12 * v2;
    c2[k] = m.a12 * v1 + m.a22 * v2;
  }
  return {inverse_fft(c1, n), inverse_fft(c2, n)};
}

double lkk_shift(double w, double length, int n) {
  const auto symbol = SymbolMatrix::theta(w, length);
  double lowest = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= n / 2; ++k) lowest = std::min(lowest, symbol.evaluate(k, n).a11);
  return 1.0 + std::max(0.0, -lowest);
}

EllipticityBounds measure_ellipticity(const SymbolMatrix& symbol, int n, double s) {
  EllipticityBounds b{std::numeric_limits<double>::infinity(), 0.0};
  for (int k = 1; k <= n / 2; ++k) {
    const auto ev = symbol.evaluate(k, n).eigenvalues();
    const double weight = std::pow(static_cast<double>(k), s);
    b.c1 = std::min(b.c1, ev[0] / weight);
    b.c2 = std::max(b.c2, ev[1] / weight);
  }
  return b;
}

}  // namespace pwstab
