#pragma once

#include <array>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "pwstab/fourier.hpp"
#include "pwstab/symbols.hpp"
#include "pwstab/system.hpp"

namespace pwstab {

using Matrix2 = std::array<std::array<double, 2>, 2>;

/// Real roots of a real polynomial given by ascending coefficients, each
/// polished by Newton and deduplicated at 1e-8. The zero polynomial yields
/// an empty list; callers distinguish that case themselves.
std::vector<double> real_polynomial_roots(std::span<const double> ascending);

/// Real roots mu of the proportional-wave compatibility relation. For kdv the
/// relation is a cubic, for mkdv a quartic whose leading term is D4.
struct CouplingRoots {
  std::vector<double> roots;  // ascending, residual < 1e-10
  bool all_mu = false;        // relation holds identically
};

/// Ascending coefficients of p(mu) = 0 for the kdv or mkdv relation.
std::vector<double> coupling_polynomial(SystemKind kind, std::span<const double> coeffs);
CouplingRoots solve_coupling_cubic(SystemKind kind, std::span<const double> coeffs);
CouplingRoots solve_coupling_cubic(const SystemSpec& system);

struct CouplingReduction {
  SystemKind kind = SystemKind::kdv;
  double mu = 0.0;
  double scale = 0.0;  // xi (kdv) or zeta (mkdv)
  Sym2 matrix;         // D or H
  double det = 0.0;
};

/// Assembles D or H for a root mu. Throws ConsistencyError when mu does not
/// satisfy the relation, DomainError when xi = 0 or zeta <= 0.
CouplingReduction build_coupling_reduction(const SystemSpec& system, double mu);

struct CouplingEigen {
  double lambda1 = 1.0;
  double lambda2 = 0.0;
  Matrix2 o{};            // columns are unit eigenvectors, lambda1 first
  double residual = 0.0;  // max(|lambda1 - 1|, |lambda2 - det|)
};

/// Closed-form Jacobi rotation of the 2x2 coupling matrix.
CouplingEigen eigen_coupling(const CouplingReduction& reduction);

/// A sampled periodic traveling wave phi = (phi1, phi2) of one system.
struct WaveProfile {
  SystemSpec system;
  double length = 0.0;
  double speed = 0.0;  // c, or omega for lkk
  double a1 = 0.0;
  double a2 = 0.0;
  double mu = 1.0;
  /// phi = amplitude_factor * reduced for proportional waves.
  double amplitude_factor = 1.0;
  Field2 values{};
  std::array<ComplexVector, 2> coeffs{};
  /// Scalar profile solving the reduced equation and its constant.
  RealVector reduced{};
  double reduced_constant = 0.0;
  std::map<std::string, double> params{};
  double residual = 0.0;
  std::vector<double> newton_history{};

  int size() const noexcept { return static_cast<int>(values[0].size()); }
  PeriodicGrid grid() const { return {size(), length}; }
  double param(const std::string& key) const;
};

/// Wraps arbitrary samples (phi1, phi2) as a profile of `system`. The
/// proportionality constant is left at 1 and `reduced` holds phi1.
WaveProfile make_wave(const SystemSpec& system, double length, double speed, const Field2& values,
                      double a1 = 0.0, double a2 = 0.0);

/// Relative grid L2 residual of M phi + c phi - grad R(phi) + (A1, A2).
double equation_residual(const WaveProfile& wave);

/// Cnoidal solution of -f'' + c f - f^2/2 = 0 with minimal period L.
struct CnoidalData {
  RealVector values;
  double speed;
};
CnoidalData cnoidal_profile(double length, double k, int n);

/// Dnoidal solution of -f'' + c f - 2 f^3 + A = 0. The speed is the reading
/// of c(k) with the smaller residual; both residuals are reported.
struct DnoidalData {
  RealVector values;
  double speed;
  double constant;
  double residual_k;   // c = 16 K sqrt(k^4 - k^2 + 1) / L^2
  double residual_k2;  // c = 16 K^2 sqrt(k^4 - k^2 + 1) / L^2
};
DnoidalData dnoidal_profile(double length, double k, int n);

/// Scalar KdV wave (system B = (1/2, 0, 0, 0), mu = 0).
WaveProfile build_cnoidal_wave(double length, double k, int n = 256);
/// Proportional coupled KdV wave phi = (phi~/xi)(1, mu).
WaveProfile build_cnoidal_wave(const SystemSpec& system, double mu, double length, double k,
                               int n = 256);

/// Scalar mKdV wave (system D = (2, 0, 0, 0, 0), mu = 0).
WaveProfile build_dnoidal_wave(double length, double k, int n = 256);
/// Proportional coupled mKdV wave phi = (6/zeta)^{1/2} phi~ (1, mu).
WaveProfile build_dnoidal_wave(const SystemSpec& system, double mu, double length, double k,
                               int n = 256);

/// Constant solutions of c f - f log f^2 + A = 0 with f > 0, ascending.
std::vector<double> logkdv_equilibria(double c, double a);
/// The positive nonlinear center, i.e. the largest positive equilibrium.
double logkdv_center(double c, double a);
/// |A| = 2 e^{c/2 - 1} separates the two parameter regions.
double logkdv_threshold(double c);

/// Closed orbit of f'' = c f - f log f^2 + A through (f_max, 0).
struct LogKdvOrbit {
  double center;
  double f_max;
  double f_min;
  double period;
};
/// Throws DomainError when the orbit through center + amplitude is not a
/// closed orbit in f > 0.
LogKdvOrbit logkdv_orbit(double c, double a, double amplitude);

/// Largest amplitude for which the orbit through center + amplitude stays
/// closed in f > 0 (the separatrix or the f = 0 boundary).
double logkdv_max_amplitude(double c, double a);
/// Bisection over the amplitude for the closed orbit of period `period`.
/// Throws DomainError when the target is outside the attainable range.
double logkdv_amplitude_for_period(double c, double a, double period);

/// One polyline of the (f, f') phase plane.
struct PhaseOrbit {
  std::string kind;  // "orbit" or "equilibrium"
  double level = 0.0;  // (f')^2 / 2 - V(f), V' = c f - f log f^2 + A
  double f_min = 0.0;
  double f_max = 0.0;
  double period = 0.0;
  std::vector<std::array<double, 2>> points;
};
/// Equilibria (single points, zero velocity) followed by `count` closed
/// orbits with amplitudes evenly spread over (0, max amplitude), each
/// sampled at `samples` points over one period.
std::vector<PhaseOrbit> logkdv_phase_portrait(double c, double a, int count = 12,
                                              int samples = 200);

/// Even solution with emergent period: phase-plane shooting for a first
/// guess, then Newton on the even cosine basis.
WaveProfile build_logkdv_wave(double c, double a, int n = 256, double amplitude = 0.5);
/// Newton at a prescribed period starting from the samples of `initial`.
WaveProfile build_logkdv_wave_with_period(double c, double a, double period,
                                          const RealVector& initial);

/// Explicit W = 0 profile (4 pi/L) sinh g / (cosh g - cos(2 pi x/L)).
WaveProfile build_bo_wave(double omega, double length, int n = 256);
/// Newton on (M11 + M12)_W f + omega f - f^2/2 = 0 in the even subspace,
/// continued from `initial` in increments of W no larger than 0.01.
WaveProfile continue_lkk_wave(double omega, double w, const WaveProfile& initial);

/// Result of a Newton solve in the even cosine basis.
struct EvenNewtonResult {
  RealVector values;
  std::vector<double> history;
};

/// Even-subspace linear solve of (M + diag(potential)) g = rhs where M has
/// the real even symbol `symbol[k]`, k = 0..N/2. Throws SingularityError.
RealVector solve_even(std::span<const double> symbol, std::span<const double> potential,
                      std::span<const double> rhs);

}  // namespace pwstab
