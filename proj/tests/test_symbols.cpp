#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "pwstab/errors.hpp"
#include "pwstab/linearized.hpp"
#include "pwstab/symbols.hpp"

using namespace pwstab;
using std::numbers::pi;

TEST_CASE("theta at W = 0 is |xi| exactly") {
  for (double xi : {-7.5, -1.0, 0.0, 0.25, 40.0}) CHECK(theta_symbol(xi, 0.0) == std::abs(xi));
}

TEST_CASE("theta at the origin is -W") {
  for (double w : {0.01, 0.5, 3.0}) CHECK(std::abs(theta_symbol(0.0, w) + w) < 1e-15);
}

TEST_CASE("theta agrees with the closed form away from the series branch") {
  // theta(xi, W) = xi coth(xi / W) - W - xi / sinh(xi / W) = xi tanh(xi / 2W) - W.
  for (double w : {0.05, 0.7, 2.0}) {
    for (double xi : {0.01, 0.3, 2.0, 9.0}) {
      CHECK(std::abs(theta_symbol(xi, w) - (xi * std::tanh(xi / (2.0 * w)) - w)) < 1e-12);
    }
  }
  CHECK(std::abs(theta_symbol(1e4, 0.001) - (1e4 - 0.001)) < 1e-9);
}

TEST_CASE("theta converges monotonically to |xi| as W decreases") {
  double previous = INFINITY;
  for (double w : {0.2, 0.1, 0.05, 0.02, 0.01}) {
    double err = 0.0;
    for (int k = -128; k <= 128; ++k) err = std::max(err, std::abs(theta_symbol(k, w) - std::abs(k)));
    CHECK(err < previous);
    previous = err;
  }
}

TEST_CASE("evaluated symbols are even and symmetric") {
  const auto s = SymbolMatrix::lkk(0.3, 5.0);
  for (int k = 0; k <= 32; ++k) {
    const Sym2 a = s.evaluate(k, 64);
    const Sym2 b = s.evaluate(-k, 64);
    CHECK(a.a11 == b.a11);
    CHECK(a.a12 == b.a12);
    CHECK(a.a11 == a.a22);
  }
  CHECK_THROWS_AS(s.evaluate(33, 64), DomainError);
}

TEST_CASE("laplacian on a single cosine") {
  const double len = 3.0;
  const int n = 32;
  Field2 u{RealVector(n), RealVector(n, 0.0)};
  for (int j = 0; j < n; ++j) u[0][j] = std::cos(2.0 * pi * j / n);
  const auto r = apply_multiplier(SymbolMatrix::laplacian(len), u);
  const double w2 = std::pow(2.0 * pi / len, 2);
  for (int j = 0; j < n; ++j) {
    CHECK(std::abs(r[0][j] - w2 * u[0][j]) < 1e-12);
    CHECK(std::abs(r[1][j]) < 1e-15);
  }
}

TEST_CASE("constant input picks up m(0)") {
  const auto s = SymbolMatrix::lkk(0.4, 2.0).with_shift(1.5);
  const Sym2 m0 = s.evaluate(0, 16);
  const Field2 u{RealVector(16, 2.0), RealVector(16, -1.0)};
  const auto r = apply_multiplier(s, u);
  for (int j = 0; j < 16; ++j) {
    CHECK(std::abs(r[0][j] - (2.0 * m0.a11 - m0.a12)) < 1e-13);
    CHECK(std::abs(r[1][j] - (2.0 * m0.a12 - m0.a22)) < 1e-13);
  }
}

TEST_CASE("multiplier agrees with a dense DFT matrix") {
  const int n = 64;
  const double len = 7.0;
  const auto s = SymbolMatrix::lkk(0.25, len);
  std::mt19937 rng(11);
  std::normal_distribution<double> d;
  Field2 u{RealVector(n), RealVector(n)};
  for (auto& comp : u) {
    for (double& v : comp) v = d(rng);
  }
  const auto fast = apply_multiplier(s, u);
  for (int j = 0; j < n; ++j) {
    double r1 = 0.0, r2 = 0.0;
    for (int l = 0; l < n; ++l) {
      for (int k = -n / 2 + 1; k <= n / 2; ++k) {
        const Sym2 m = s.evaluate(std::abs(k), n);
        const double w = (k == n / 2 ? std::cos(pi * (j - l)) : std::cos(2.0 * pi * k * (j - l) / n)) / n;
        r1 += w * (m.a11 * u[0][l] + m.a12 * u[1][l]);
        r2 += w * (m.a12 * u[0][l] + m.a22 * u[1][l]);
      }
    }
    CHECK(std::abs(fast[0][j] - r1) < 1e-10);
    CHECK(std::abs(fast[1][j] - r2) < 1e-10);
  }
}

TEST_CASE("dense multiplier block agrees with apply_multiplier") {
  const int n = 64;
  const auto s = SymbolMatrix::theta(0.1, 6.0);
  const auto mat = multiplier_matrix(scalar_symbol_values(s, n), n);
  std::mt19937 rng(5);
  std::normal_distribution<double> d;
  RealVector u(n);
  for (double& v : u) v = d(rng);
  const auto fast = apply_scalar_multiplier(s, u);
  for (int j = 0; j < n; ++j) {
    double acc = 0.0;
    for (int l = 0; l < n; ++l) acc += mat(j, l) * u[l];
    CHECK(std::abs(acc - fast[j]) < 1e-10);
  }
}

TEST_CASE("shifted lkk symbol is elliptic on the lattice") {
  for (double w : {0.0, 0.05, 0.5, 2.0}) {
    const double len = 2.0 * pi;
    const double sigma = lkk_shift(w, len, 128);
    CHECK(sigma >= 1.0);
    const auto s = SymbolMatrix::lkk(w, len).with_shift(sigma);
    double lowest = INFINITY;
    for (int k = 0; k <= 64; ++k) lowest = std::min(lowest, theta_symbol(2.0 * pi * k / len, w));
    for (int k = 0; k <= 64; ++k) CHECK(s.evaluate(k, 128).eigenvalues()[0] >= sigma + lowest - 1e-12);
    const auto b = measure_ellipticity(s, 128, 1.0);
    CHECK(b.c1 > 0.0);
    CHECK(b.c2 >= b.c1);
  }
}
