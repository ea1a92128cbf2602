#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "pwstab/waves.hpp"

namespace pwstab {

/// E = int (1/2)<M u, u> - R(u), F = (1/2) int <u, u>, M = int (u1 + u2).
struct Invariants {
  double energy = 0.0;
  double momentum = 0.0;
  double mass = 0.0;
};
Invariants conserved_quantities(const Field2& u, const SystemSpec& system, double length);

/// Norm of H^{s/2} x H^{s/2} with Fourier weights (1 + xi^2)^{s/2}.
double energy_norm(const Field2& u, double s, double length);

struct OrbitalFit {
  double distance = 0.0;
  double shift = 0.0;  // minimizing y in [0, L)
};

/// inf_y ||u - v(. + y)||: coarse scan over the N grid shifts by a
/// cross-correlation FFT, then golden-section refinement of the directly
/// evaluated difference norm.
OrbitalFit orbital_fit(const Field2& u, const Field2& v, double s, double length);
double orbital_distance(const Field2& u, const Field2& v, double s, double length);

/// max over the lattice of |xi| times the largest |eigenvalue| of m(kappa).
double linear_stiffness(const SystemSpec& system, double length, int n);
/// Throws DomainError unless |dt| <= cfl / linear_stiffness.
void check_time_step(const SystemSpec& system, double length, int n, double dt, double cfl);

/// Fourth-order exponential time differencing for
///   u_t = d_x (M u) - d_x grad R(u)
/// with the linear part diagonalized per mode and the phi-functions
/// evaluated by a 64-point contour mean. The nonlinear term is dealiased by
/// the 2/3 rule on input and output.
class Etdrk4 {
 public:
  Etdrk4(const SystemSpec& system, double length, int n, double dt);

  double dt() const noexcept { return dt_; }
  int size() const noexcept { return n_; }
  /// Advances u in place by one step. Throws DomainError when a log-KdV
  /// state drops below 1e-8.
  void step(Field2& u) const;

 private:
  struct Mode {
    Matrix2 basis{};  // columns are eigenvectors of m(kappa)
    std::array<Complex, 2> e{}, e2{}, q{}, f1{}, f2{}, f3{};
    Complex derivative{};  // -i xi, 0 at Nyquist and above the 2/3 cut
    bool keep = false;
  };
  using Spectrum = std::array<ComplexVector, 2>;
  Spectrum nonlinear(const Spectrum& w) const;

  SystemSpec system_;
  double length_;
  int n_;
  double dt_;
  std::vector<Mode> modes_;
};

struct HistoryRow {
  double t = 0.0;
  double energy = 0.0;
  double momentum = 0.0;
  double mass = 0.0;
  double rho = 0.0;
};

struct SimulationState {
  Field2 u;
  double t = 0.0;
  double dt = 0.0;
  std::vector<HistoryRow> history;
};

/// One integrator step plus NaN/Inf detection. Throws BlowUpError carrying
/// the last valid time; the state is left at that time.
void step_etdrk4(SimulationState& state, const Etdrk4& integrator);

/// Zero-mean perturbation with modes 1 <= |kappa| <= N/8, unit energy norm,
/// reproducible from the seed.
Field2 band_limited_perturbation(int n, double length, double s, std::uint64_t seed);

struct StabilityConfig {
  double delta = 1e-3;
  double horizon = 20.0;
  double dt = 1e-3;
  std::uint64_t seed = 1;
  double k_ratio = 10.0;
  double cfl = 4000.0;
  int record_every = 100;
};

struct StabilityResult {
  std::vector<HistoryRow> history;
  Field2 final_state;
  double max_rho = 0.0;
  double drift_energy = 0.0;  // max relative drift against t = 0
  double drift_momentum = 0.0;
  double drift_mass = 0.0;
  bool bounded = false;
  bool blew_up = false;
  double last_valid_time = 0.0;
  std::string message;
};

/// Evolves phi + delta p and records (t, E, F, M, rho(u(t), phi)). A blow-up
/// is reported in the result with the partial history.
StabilityResult stability_experiment(const WaveProfile& wave, const StabilityConfig& config);

/// Columns t,E,F,M,rho with 17 significant digits.
void write_history_csv(const std::vector<HistoryRow>& history, const std::string& path);

}  // namespace pwstab
