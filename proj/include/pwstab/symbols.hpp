#pragma once

#include <array>
#include <span>
#include <string_view>

#include "pwstab/fourier.hpp"

namespace pwstab {

/// A pair of real grid functions (u1, u2).
using Field2 = std::array<RealVector, 2>;

/// Entries of a real symmetric 2x2 matrix.
struct Sym2 {
  double a11 = 0.0;
  double a12 = 0.0;
  double a22 = 0.0;

  /// Eigenvalues in ascending order.
  std::array<double, 2> eigenvalues() const;
};

enum class SymbolKind {
  laplacian,  // m_ii = xi^2, m_12 = 0
  lkk,        // m_11 = m_22 = xi coth(xi/W) - W, m_12 = -xi / sinh(xi/W)
  theta,      // scalar theta(xi, W) = m_11 + m_12 of the lkk symbol
  bo,         // scalar |xi|
};

std::string_view to_string(SymbolKind kind);

/// theta(xi, W) = xi coth(xi/W) - W - xi / sinh(xi/W) for W > 0 and |xi| for W = 0.
/// Removable singularity at xi = 0 evaluated by series (value -W); for
/// |xi|/W > 700 the asymptote |xi| - W is returned.
double theta_symbol(double xi, double w);

/// Fourier multiplier symbol m(kappa) of a dispersion operator, evaluated on
/// the lattice of integer modes of an L-periodic grid (physical frequency
/// 2 pi kappa / L) plus an optional shift sigma * Id.
class SymbolMatrix {
 public:
  static SymbolMatrix laplacian(double length);
  /// Liu-Kubota-Ko symbol with W = 1/H >= 0; W = 0 is the decoupled BO limit.
  static SymbolMatrix lkk(double w, double length);
  static SymbolMatrix theta(double w, double length);
  static SymbolMatrix bo(double length);

  SymbolMatrix with_shift(double sigma) const;

  SymbolKind kind() const noexcept { return kind_; }
  double parameter() const noexcept { return w_; }
  double shift() const noexcept { return shift_; }
  double length() const noexcept { return length_; }
  /// Scalar symbols act identically and independently on each component.
  bool is_scalar() const noexcept { return kind_ == SymbolKind::theta || kind_ == SymbolKind::bo; }

  /// m(kappa) + shift * Id for |kappa| <= n/2. Throws DomainError otherwise.
  Sym2 evaluate(int kappa, int n) const;
  /// Same, at an arbitrary physical frequency (no lattice check).
  Sym2 at_frequency(double xi) const;

 private:
  SymbolMatrix(SymbolKind kind, double w, double length);
  SymbolKind kind_;
  double w_ = 0.0;
  double shift_ = 0.0;
  double length_ = 1.0;
};

/// The (1,1) entries m(kappa) for kappa = 0..n/2.
RealVector scalar_symbol_values(const SymbolMatrix& symbol, int n);

/// Applies the (1,1) entry of the symbol to a single grid function.
RealVector apply_scalar_multiplier(const SymbolMatrix& symbol, std::span<const double> u);

/// Computes M u by forward FFT, a 2x2 multiply per mode and inverse FFT.
Field2 apply_multiplier(const SymbolMatrix& symbol, const Field2& u);

/// Shift sigma0 = 1 + max(0, -min theta(kappa, W)) over the truncated lattice,
/// which makes sigma0 Id + m(kappa) positive definite for the lkk symbol.
double lkk_shift(double w, double length, int n);

struct EllipticityBounds {
  double c1;
  double c2;
};

/// Measured constants in c1 |kappa|^s <= <m(kappa) w, w> <= c2 |kappa|^s over
/// 1 <= |kappa| <= n/2 and unit vectors w.
EllipticityBounds measure_ellipticity(const SymbolMatrix& symbol, int n, double s);

}  // namespace pwstab
