#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "doctest.h"
#include "pwstab/errors.hpp"
#include "pwstab/linearized.hpp"

using namespace pwstab;
using std::numbers::pi;

namespace {

std::vector<double> sorted_eigenvalues(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  std::vector<double> v(es.eigenvalues().data(), es.eigenvalues().data() + m.rows());
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

TEST_CASE("zero state gives the pure multiplier spectrum") {
  const int n = 64;
  const double len = 2.0 * pi;
  const double c = 0.7;
  const auto w = make_wave(SystemSpec::kdv({1, 1, 0, 0}), len, c, {RealVector(n, 0.0), RealVector(n, 0.0)});
  const auto op = assemble_operator(w);
  CHECK(op.symmetry_defect < 1e-12);
  const auto ev = sorted_eigenvalues(op.matrix);
  std::vector<double> expected;
  for (int k = -n / 2 + 1; k <= n / 2; ++k) {
    expected.push_back(k * k + c);
    expected.push_back(k * k + c);
  }
  std::sort(expected.begin(), expected.end());
  for (std::size_t i = 0; i < ev.size(); ++i) CHECK(std::abs(ev[i] - expected[i]) < 1e-9 * expected[i]);
}

TEST_CASE("cnoidal kdv operator annihilates phi'") {
  const auto sys = SystemSpec::kdv({1, 1, 0, 0});
  const double mu = (-1.0 + std::sqrt(3.0)) / 2.0;
  const auto w = build_cnoidal_wave(sys, mu, 2.0 * pi, 0.5, 128);
  const auto op = assemble_operator(w);
  CHECK(op.symmetry_defect < 1e-12);
  const Field2 dphi{spectral_derivative(w.values[0], w.length, 1),
                    spectral_derivative(w.values[1], w.length, 1)};
  const auto r = apply_operator(op.matrix, dphi);
  const double num = std::hypot(l2_norm(r[0], w.length), l2_norm(r[1], w.length));
  const double den = std::hypot(l2_norm(dphi[0], w.length), l2_norm(dphi[1], w.length));
  CHECK(num / den < 1e-6);
}

TEST_CASE("operator assembly rejects a foreign system") {
  const auto w = build_cnoidal_wave(2.0 * pi, 0.5, 64);
  CHECK_THROWS_AS(assemble_operator(w, SystemSpec::kdv({1, 1, 0, 0})), ConsistencyError);
}

TEST_CASE("block diagonalization for kdv") {
  const auto sys = SystemSpec::kdv({1, 1, 0, 0});
  const double mu = (-1.0 + std::sqrt(3.0)) / 2.0;
  const auto w = build_cnoidal_wave(sys, mu, 2.0 * pi, 0.5, 64);
  const auto op = assemble_operator(w);
  const auto blocks = diagonalize_operator(op);
  CHECK(blocks.offdiag_residual < 1e-8);
  // Union of block spectra equals the full spectrum.
  auto full = sorted_eigenvalues(op.matrix);
  auto b1 = sorted_eigenvalues(blocks.l1);
  auto b2 = sorted_eigenvalues(blocks.l2);
  b1.insert(b1.end(), b2.begin(), b2.end());
  std::sort(b1.begin(), b1.end());
  for (std::size_t i = 0; i < full.size(); ++i) CHECK(std::abs(full[i] - b1[i]) < 1e-8 * (1.0 + std::abs(full[i])));
  // L1 = -d^2 + c - phi~ with phi~ = xi phi1.
  const double xi = w.param("xi");
  const int n = w.size();
  Eigen::MatrixXd l1 = multiplier_matrix(scalar_symbol_values(SymbolMatrix::laplacian(w.length), n), n);
  for (int j = 0; j < n; ++j) l1(j, j) += w.speed - xi * w.values[0][j];
  CHECK((l1 - blocks.l1).norm() < 1e-9 * l1.norm());
}

TEST_CASE("decoupled kdv gives identical blocks") {
  const auto w = build_cnoidal_wave(SystemSpec::kdv({0.5, 0, 0, 0.5}), 1.0, 2.0 * pi, 0.5, 64);
  const auto blocks = diagonalize_operator(assemble_operator(w));
  CHECK((blocks.l1 - blocks.l2).norm() < 1e-10 * blocks.l1.norm());
}

TEST_CASE("log-KdV uses the fixed rotation") {
  const auto w = build_logkdv_wave(1.0, 2.0, 64);
  const auto blocks = diagonalize_operator(assemble_operator(w));
  const double r = 1.0 / std::sqrt(2.0);
  CHECK(blocks.conjugator[0][0] == doctest::Approx(r));
  CHECK(blocks.conjugator[0][1] == doctest::Approx(r));
  CHECK(blocks.conjugator[1][0] == doctest::Approx(-r));
  CHECK(blocks.conjugator[1][1] == doctest::Approx(r));
  CHECK(blocks.offdiag_residual < 1e-8);
  const int n = w.size();
  Eigen::MatrixXd lap = multiplier_matrix(scalar_symbol_values(SymbolMatrix::laplacian(w.length), n), n);
  Eigen::MatrixXd l1 = lap, l2 = lap;
  for (int j = 0; j < n; ++j) {
    const double lg = std::log(w.values[0][j] * w.values[0][j]);
    l1(j, j) += w.speed - 2.0 - lg;
    l2(j, j) += w.speed + lg;
  }
  // The rotation maps (1, 1) to the second slot.
  const double d1 = std::min((l1 - blocks.l1).norm(), (l1 - blocks.l2).norm());
  const double d2 = std::min((l2 - blocks.l1).norm(), (l2 - blocks.l2).norm());
  CHECK(d1 < 1e-9 * l1.norm());
  CHECK(d2 < 1e-9 * l2.norm());
}

TEST_CASE("non-proportional waves cannot be diagonalized") {
  RealVector a(64), b(64);
  for (int j = 0; j < 64; ++j) {
    a[j] = 1.0 + 0.1 * std::cos(2.0 * pi * j / 64);
    b[j] = 1.0 + 0.1 * std::sin(2.0 * pi * j / 64);
  }
  const auto w = make_wave(SystemSpec::logkdv(), 2.0 * pi, 1.0, {a, b});
  CHECK_THROWS_AS(diagonalize_operator(assemble_operator(w)), UnsupportedError);
}

TEST_CASE("operator dumps carry a header") {
  const auto w = build_cnoidal_wave(2.0 * pi, 0.5, 64);
  const auto op = assemble_operator(w);
  const auto dir = std::filesystem::temp_directory_path() / "pwstab_dump_test";
  std::filesystem::create_directories(dir);
  write_operator_csv(op, (dir / "op.csv").string());
  write_operator_binary(op, (dir / "op.bin").string());
  std::ifstream in(dir / "op.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header.rfind("# N=64 L=", 0) == 0);
  CHECK(header.find("system=kdv") != std::string::npos);
  std::ifstream bin(dir / "op.bin", std::ios::binary);
  std::getline(bin, header);
  std::vector<double> data(128 * 128);
  bin.read(reinterpret_cast<char*>(data.data()), data.size() * sizeof(double));
  CHECK(bin.gcount() == static_cast<std::streamsize>(data.size() * sizeof(double)));
  CHECK(data[1] == op.matrix(0, 1));
  std::filesystem::remove_all(dir);
}
