#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pwstab/linearized.hpp"

namespace pwstab {

/// Eigenvalue counts of one scalar block.
struct BlockCounts {
  int negative = 0;
  int zero = 0;
  double ground = 0.0;  // smallest eigenvalue
};

/// Eigenvalue diagnostics of L. Eigenvalues below -gap_tol are negative,
/// those within gap_tol of 0 are zero, gap_tol = 1e-8 * spectral radius.
struct SpectralReport {
  std::string system;
  int dimension = 0;
  int negative_count = 0;
  int zero_count = 0;
  double zero_residual = 0.0;   // ||L phi'|| / ||phi'||
  double zero_alignment = 0.0;  // norm of phi' projected on the zero eigenspace, relative
  double smallest_positive = 0.0;
  double gap_tol = 0.0;
  double spectral_radius = 0.0;
  std::vector<double> eigenvalues_low;  // first 10
  bool numeric_ok = false;
  std::string criterion;
  double criterion_value = 0.0;
  double criterion_bound = 0.0;
  bool criterion_ok = false;
  std::optional<BlockCounts> block1;
  std::optional<BlockCounts> block2;
  /// lkk only: negative count of the unreduced 2N operator.
  std::optional<int> full_negative_count;
  std::string note;
  bool h1_verdict = false;
};

/// Full symmetric eigensolve plus block counts where the operator
/// diagonalizes. For lkk the counts refer to the reduced operator G.
SpectralReport check_h1(const LinearizedOperator& op);

enum class DerivativeMethod { family_fd, solve };
std::string_view to_string(DerivativeMethod method);

/// Sign of I = <L Phi, Phi> for a Phi with L Phi = Q'(phi).
struct H2Report {
  std::string system;
  DerivativeMethod method = DerivativeMethod::family_fd;
  double i_value = 0.0;    // <L Phi, Phi> with the assembled operator
  double i_via_q = 0.0;    // <Q'(phi), Phi>
  double i_formula = 0.0;  // closed expression through family derivatives
  double orthogonality = 0.0;
  double orthogonality_bound = 0.0;
  double q_residual = 0.0;          // ||L Phi - Q'(phi)|| / ||Q'(phi)||
  double route_discrepancy = 0.0;   // ||Phi_fd - Phi_solve|| / ||Phi_fd||
  std::map<std::string, double> quantities;
  Field2 phi_direction;
  bool h2_verdict = false;
};

/// Phi = (d phi / dc)(1, mu) along the cnoidal family at fixed L, Q = -F.
H2Report build_phi_kdv(const SystemSpec& system, double mu, double length, double k, int n = 256,
                       double dk = 1e-4, DerivativeMethod method = DerivativeMethod::family_fd);

/// Phi = (d phi / dk)(1, mu) along the dnoidal family; reports I~ and
/// I = 6 (mu^2 + 1) / zeta * I~.
H2Report build_phi_mkdv(const SystemSpec& system, double mu, double length, double k, int n = 256,
                        double dk = 1e-4, DerivativeMethod method = DerivativeMethod::family_fd);

struct LogKdvFamilyDerivatives {
  double c = 0.0;
  double a = 0.0;
  double period = 0.0;
  RealVector eta;   // d phi / dc
  RealVector beta;  // d phi / dA
  double m_val = 0.0;  // M = 2 int phi
  double f_val = 0.0;  // F = int phi^2
  double m_c = 0.0, m_a = 0.0, f_c = 0.0, f_a = 0.0;
  /// K(x, y) = x^2 F_c + 2 x y M_c + y^2 M_A.
  std::array<double, 3> k_coeffs{};
  double k_value = 0.0;   // K(1, A/2)
  double k_closed = 0.0;  // A M / 4 + F
  double identity_fa_mc = 0.0;
  double identity_fc = 0.0;
  double identity_fa = 0.0;

  double quadratic_form(double x, double y) const;
};

/// Centered differences at the fixed period of the (c, A) wave with one
/// Richardson step (delta, delta/2).
LogKdvFamilyDerivatives logkdv_family_derivatives(double c, double a, double delta = 1e-3,
                                                  int n = 256, double amplitude = 0.5);

/// Phi = (eta + (A/2) beta)(1, 1), Q = -(F + (A/2) M), I = -K(1, A/2).
H2Report check_h2_logkdv(double c, double a, double delta = 1e-3, int n = 256,
                         double amplitude = 0.5,
                         DerivativeMethod method = DerivativeMethod::family_fd);

/// Phi = (d phi / d omega)(1, 1) at fixed W, Q = -F, I = -d ||phi||^2 / d omega.
H2Report check_h2_lkk(double omega, double w, double length, double d_omega = 1e-3, int n = 256,
                      DerivativeMethod method = DerivativeMethod::family_fd);

}  // namespace pwstab
