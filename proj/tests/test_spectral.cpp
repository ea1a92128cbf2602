#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "pwstab/errors.hpp"
#include "pwstab/spectral.hpp"

using namespace pwstab;
using std::numbers::pi;

namespace {

const SystemSpec kKdv = SystemSpec::kdv({1, 1, 0, 0});
const double kMu = (-1.0 + std::sqrt(3.0)) / 2.0;

// ||phi||^2 of the explicit W = 0 profile by adaptive quadrature.
double bo_norm2(double omega, double len) {
  const double g = std::acosh(1.0 / std::sqrt(1.0 - std::pow(2.0 * pi / (omega * len), 2)));
  auto f = [&](double x) {
    const double v = 4.0 * pi / len * std::sinh(g) / (std::cosh(g) - std::cos(2.0 * pi * x / len));
    return v * v;
  };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, len, 20, 1e-14);
}

}  // namespace

TEST_CASE("H1 holds for a kdv pair with det D < 1/2") {
  const auto w = build_cnoidal_wave(kKdv, kMu, 2.0 * pi, 0.5, 128);
  const auto r = check_h1(assemble_operator(w));
  CHECK(r.criterion_value < 0.5);
  CHECK(r.negative_count == 1);
  CHECK(r.zero_count == 1);
  CHECK(r.zero_residual < 1e-6);
  CHECK(r.zero_alignment > 1.0 - 1e-6);
  CHECK(r.h1_verdict);
  REQUIRE(r.block1);
  REQUIRE(r.block2);
  CHECK(r.block1->negative + r.block2->negative == r.negative_count);
  CHECK(r.block1->zero + r.block2->zero == r.zero_count);
}

TEST_CASE("decoupled kdv duplicates the negative eigenvalue") {
  const auto w = build_cnoidal_wave(SystemSpec::kdv({0.5, 0, 0, 0.5}), 1.0, 2.0 * pi, 0.5, 128);
  const auto r = check_h1(assemble_operator(w));
  CHECK(r.criterion_value == doctest::Approx(1.0));
  CHECK(r.negative_count == 2);
  CHECK_FALSE(r.h1_verdict);
}

TEST_CASE("zero state has a positive spectrum") {
  const int n = 64;
  const auto w = make_wave(SystemSpec::kdv({0.5, 0, 0, 0}), 2.0 * pi, 0.3,
                           {RealVector(n, 0.0), RealVector(n, 0.0)});
  const auto r = check_h1(assemble_operator(w));
  CHECK(r.negative_count == 0);
  CHECK(r.zero_count == 0);
  CHECK_FALSE(r.h1_verdict);
}

TEST_CASE("mkdv boundary case is reported") {
  const auto w = build_dnoidal_wave(SystemSpec::mkdv({1, 0, 1, 0, 1}), 0.0, 2.0 * pi, 0.5, 128);
  const auto r = check_h1(assemble_operator(w));
  CHECK(r.criterion_value == doctest::Approx(1.0 / 3.0));
  CHECK_FALSE(r.criterion_ok);
  CHECK_FALSE(r.h1_verdict);
  CHECK(r.note.find("boundary") != std::string::npos);
}

TEST_CASE("ground state of L2 crosses zero as det D passes 1/2") {
  // kdv (1/2, 0, B3, 0) with mu = 0: D = diag(1, 2 B3), so det D = 2 B3.
  double previous = INFINITY;
  for (double det : {0.2, 0.4, 0.5, 0.6, 0.8}) {
    const auto sys = SystemSpec::kdv({0.5, 0.0, det / 2.0, 0.0});
    const auto w = build_cnoidal_wave(sys, 0.0, 2.0 * pi, 0.5, 64);
    const auto blocks = diagonalize_operator(assemble_operator(w));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(blocks.l2, Eigen::EigenvaluesOnly);
    const double ground = es.eigenvalues()(0);
    CHECK(ground < previous);
    if (det < 0.5) CHECK(ground > 0.0);
    if (det > 0.5) CHECK(ground < 0.0);
    previous = ground;
  }
}

TEST_CASE("eigenvalue counts are stable under refinement") {
  for (int n : {256, 512}) {
    const auto r = check_h1(assemble_operator(build_cnoidal_wave(kKdv, kMu, 2.0 * pi, 0.5, n)));
    CHECK(r.negative_count == 1);
    CHECK(r.zero_count == 1);
  }
}

TEST_CASE("kdv slope condition") {
  for (double k : {0.2, 0.5, 0.9}) {
    const auto r = build_phi_kdv(kKdv, kMu, 2.0 * pi, k, 128);
    CHECK(r.i_value < 0.0);
    CHECK(r.quantities.at("dnorm2_dc") > 0.0);
    CHECK(std::abs(r.orthogonality) < 1e-10);
    CHECK(r.q_residual < 1e-5);
    CHECK(std::abs(r.i_value - r.i_via_q) < 1e-4 * std::abs(r.i_value));
    CHECK(std::abs(r.i_value - r.i_formula) < 1e-4 * std::abs(r.i_value));
    CHECK(r.h2_verdict);
  }
  const auto fd = build_phi_kdv(kKdv, kMu, 2.0 * pi, 0.5, 128);
  const auto solve = build_phi_kdv(kKdv, kMu, 2.0 * pi, 0.5, 128, 1e-4, DerivativeMethod::solve);
  CHECK(std::abs(fd.i_value - solve.i_value) < 1e-6 * std::abs(fd.i_value));
}

TEST_CASE("mkdv slope condition") {
  const auto sys = SystemSpec::mkdv({-1, 0, 1, 0, 0.5});
  for (double k : {0.2, 0.4, 0.6, 0.8}) {
    const auto r = build_phi_mkdv(sys, 2.0, 2.0 * pi, k, 128);
    const double tilde = r.quantities.at("I_tilde");
    CHECK(tilde < 0.0);
    CHECK((r.i_value < 0.0) == (tilde < 0.0));
    CHECK(r.q_residual < 1e-5);
    CHECK(r.h2_verdict);
  }
}

TEST_CASE("log-KdV family identities") {
  for (double a : {1.0, 2.0}) {
    const auto d = logkdv_family_derivatives(1.0, a, 1e-3, 128);
    CHECK(d.identity_fa_mc < 1e-5);
    CHECK(d.identity_fc < 1e-5);
    CHECK(d.identity_fa < 1e-5);
    CHECK(d.quadratic_form(0.0, 0.0) == 0.0);
    for (double s : {0.5, 1.0, 3.0}) {
      const double lhs = d.quadratic_form(s, a * s / 2.0);
      CHECK(lhs == doctest::Approx(s * s * (a * d.m_val / 4.0 + d.f_val)).epsilon(1e-6));
      CHECK(lhs > 0.0);
    }
    const auto r = check_h2_logkdv(1.0, a, 1e-3, 128);
    CHECK(r.i_value < 0.0);
    CHECK(r.h2_verdict);
  }
}

TEST_CASE("lkk slope condition") {
  const double len = 2.0 * pi;
  for (double om : {1.5, 2.0, 3.0}) {
    const auto r = check_h2_lkk(om, 0.0, len, 1e-3, 128);
    CHECK(r.i_value < 0.0);
    CHECK(r.h2_verdict);
    // Closed-form norm derivative by quadrature and Richardson differences.
    auto diff = [&](double h) { return (bo_norm2(om + h, len) - bo_norm2(om - h, len)) / (2.0 * h); };
    const double slope = (4.0 * diff(1e-3) - diff(2e-3)) / 3.0;
    CHECK(slope > 0.0);
    CHECK(std::abs(r.quantities.at("dnorm2_domega") - slope) < 1e-4 * slope);
    CHECK(slope == doctest::Approx(8.0 * pi).epsilon(1e-6));
  }
  const auto r = check_h2_lkk(2.0, 0.02, len, 1e-3, 128);
  CHECK(r.i_value < 0.0);
  CHECK(r.h2_verdict);
}

TEST_CASE("lkk H1 through the reduced operator") {
  const auto w = build_bo_wave(2.0, 2.0 * pi, 128);
  const auto r = check_h1(assemble_operator(w));
  CHECK(r.dimension == 128);
  CHECK(r.negative_count == 1);
  CHECK(r.zero_count == 1);
  CHECK(r.h1_verdict);
  REQUIRE(r.full_negative_count);
}
