#pragma once

namespace pwstab {

/// Elliptic modulus k restricted to the open interval (0, 1).
class EllipticModulus {
 public:
  explicit EllipticModulus(double k);
  double value() const noexcept { return k_; }
  /// Complementary modulus sqrt(1 - k^2).
  double complement() const noexcept;

 private:
  double k_;
};

/// Complete elliptic integral of the first kind K(k), 0 <= k < 1.
///
/// Arithmetic-geometric mean iteration, stopped once the arithmetic and
/// geometric means agree to relative 1e-15. Throws DomainError for k < 0,
/// k >= 1 or non-finite k.
double complete_elliptic_k(double k);

struct JacobiTriple {
  double sn;
  double cn;
  double dn;
};

/// Jacobi elliptic functions sn, cn, dn at argument u and modulus k in [0, 1].
///
/// Uses the descending Landen (AGM) sequence with backward angle recursion.
/// k = 0 and k = 1 reduce to the trigonometric and hyperbolic cases.
JacobiTriple jacobi_elliptic(double u, double k);

}  // namespace pwstab
