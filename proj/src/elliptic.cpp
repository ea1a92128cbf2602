#include "pwstab/elliptic.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "pwstab/errors.hpp"

namespace pwstab {
namespace {

constexpr double kAgmTolerance = 1e-15;
constexpr int kMaxAgmSteps = 64;

}  // namespace

EllipticModulus::EllipticModulus(double k) : k_(k) {
  if (!(k > 0.0 && k < 1.0)) {
    throw DomainError("elliptic modulus must lie strictly inside (0, 1)");
  }
}

double EllipticModulus::complement() const noexcept {
  return std::sqrt((1.0 - k_) * (1.0 + k_));
}

double complete_elliptic_k(double k) {
  if (!std::isfinite(k) || k < 0.0 || k >= 1.0) {
    throw DomainError("complete_elliptic_k: modulus must satisfy 0 <= k < 1");
  }
  double a = 1.0;
  double b = std::sqrt((1.0 - k) * (1.0 + k));
  for (int i = 0; i < kMaxAgmSteps && std::abs(a - b) > kAgmTolerance * a; ++i) {
    const double next = 0.5 * (a + b);
    b = std::sqrt(a * b);
    a = next;
  }
  return std::numbers::pi / (a + b);
}

JacobiTriple jacobi_elliptic(double u, double k) {
  if (!std::isfinite(u) || !std::isfinite(k)) {
    throw DomainError("jacobi_elliptic: non-finite input");
  }
  if (k < 0.0 || k > 1.0) {
    throw DomainError("jacobi_elliptic: modulus must satisfy 0 <= k <= 1");
  }
  if (k == 0.0) {
    return {std::sin(u), std::cos(u), 1.0};
  }
  if (k == 1.0) {
    const double sech = 1.0 / std::cosh(u);
    return {std::tanh(u), sech, sech};
  }

  std::array<double, kMaxAgmSteps + 1> a{};
  std::array<double, kMaxAgmSteps + 1> c{};
  a[0] = 1.0;
  c[0] = k;
  double b = std::sqrt((1.0 - k) * (1.0 + k));
  int n = 0;
  while (n < kMaxAgmSteps && std::abs(c[n]) > kAgmTolerance * a[n]) {
    a[n + 1] = 0.5 * (a[n] + b);
    c[n + 1] = 0.5 * (a[n] - b);
    b = std::sqrt(a[n] * b);
    ++n;
  }

  // Reduce to one real period 4K so the amplified angle below stays small.
  const double quarter = std::numbers::pi / (2.0 * a[n]);
  const double period = 4.0 * quarter;
  u = std::remainder(u, period);

  double angle = std::ldexp(a[n] * u, n);
  for (int i = n; i > 0; --i) {
    angle = 0.5 * (angle + std::asin(c[i] / a[i] * std::sin(angle)));
  }
  const double sn = std::sin(angle);
  const double cn = std::cos(angle);
  // cos(phi0)/cos(phi1 - phi0) is 0/0 at u = K; dn > 0 for k < 1.
  const double dn = std::sqrt((1.0 - k * sn) * (1.0 + k * sn));
  return {sn, cn, dn};
}

}  // namespace pwstab
