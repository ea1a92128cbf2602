#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "pwstab/errors.hpp"
#include "pwstab/fourier.hpp"

using namespace pwstab;
using std::numbers::pi;

namespace {

RealVector random_signal(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  RealVector f(n);
  for (double& v : f) v = d(rng);
  return f;
}

}  // namespace

TEST_CASE("grid rejects sizes that are not powers of two") {
  CHECK(is_power_of_two(64));
  CHECK_FALSE(is_power_of_two(48));
  CHECK_FALSE(is_power_of_two(0));
  CHECK_THROWS_AS(PeriodicGrid(48, 1.0), DomainError);
  CHECK_THROWS_AS(PeriodicGrid(4, 1.0), DomainError);
  CHECK_THROWS_AS(PeriodicGrid(64, -1.0), DomainError);
  const PeriodicGrid g(64, 2.0);
  CHECK(g.modes() == 33);
  CHECK(g.frequency(3) == doctest::Approx(3.0 * pi));
}

TEST_CASE("forward transform matches a direct DFT") {
  const int n = 32;
  const auto f = random_signal(n, 3);
  const auto c = forward_fft(f);
  for (int k = 0; k <= n / 2; ++k) {
    Complex direct = 0.0;
    for (int j = 0; j < n; ++j) direct += f[j] * std::polar(1.0, -2.0 * pi * k * j / n);
    direct /= n;
    CHECK(std::abs(c[k] - direct) < 1e-14);
  }
  const auto back = inverse_fft(c, n);
  for (int j = 0; j < n; ++j) CHECK(std::abs(back[j] - f[j]) < 1e-14);
}

TEST_CASE("spectral derivatives of a trigonometric polynomial") {
  const double len = 3.0;
  const PeriodicGrid g(64, len);
  const double w = 2.0 * pi / len;
  RealVector f(64), d1(64), d2(64), d3(64);
  for (int j = 0; j < 64; ++j) {
    const double x = g.point(j);
    f[j] = std::sin(w * x) + 0.5 * std::cos(3 * w * x);
    d1[j] = w * std::cos(w * x) - 1.5 * w * std::sin(3 * w * x);
    d2[j] = -w * w * std::sin(w * x) - 4.5 * w * w * std::cos(3 * w * x);
    d3[j] = -w * w * w * std::cos(w * x) + 13.5 * w * w * w * std::sin(3 * w * x);
  }
  const auto r1 = spectral_derivative(f, len, 1);
  const auto r2 = spectral_derivative(f, len, 2);
  const auto r3 = spectral_derivative(f, len, 3);
  double max3 = 0.0;
  for (double v : d3) max3 = std::max(max3, std::abs(v));
  for (int j = 0; j < 64; ++j) {
    CHECK(std::abs(r1[j] - d1[j]) < 1e-12);
    CHECK(std::abs(r2[j] - d2[j]) < 1e-11);
    CHECK(std::abs(r3[j] - d3[j]) < 1e-12 * max3);
  }
}

TEST_CASE("translation is exact for band-limited data") {
  const double len = 2.0 * pi;
  const PeriodicGrid g(32, len);
  RealVector f(32);
  for (int j = 0; j < 32; ++j) f[j] = std::cos(g.point(j)) + std::sin(5.0 * g.point(j));
  const double y = 0.377;
  const auto t = translate(f, len, y);
  for (int j = 0; j < 32; ++j) {
    const double x = g.point(j) + y;
    CHECK(std::abs(t[j] - (std::cos(x) + std::sin(5.0 * x))) < 1e-13);
  }
}

TEST_CASE("quadrature helpers") {
  const double len = 4.0;
  const PeriodicGrid g(16, len);
  RealVector c(16, 2.0), s(16);
  for (int j = 0; j < 16; ++j) s[j] = std::sin(2.0 * pi * g.point(j) / len);
  CHECK(inner_product(c, c, len) == doctest::Approx(16.0));
  CHECK(std::abs(inner_product(c, s, len)) < 1e-14);
  CHECK(l2_norm(s, len) == doctest::Approx(std::sqrt(2.0)));
  CHECK(max_abs(s) == doctest::Approx(1.0));
}
