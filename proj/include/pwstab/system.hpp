#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "pwstab/symbols.hpp"

namespace pwstab {

/// The four coupled systems u_t + (grad R(u) - M u)_x = 0 handled by the library.
enum class SystemKind { kdv, mkdv, logkdv, lkk };

std::string_view to_string(SystemKind kind);
/// Parses "kdv", "mkdv", "logkdv" or "lkk". Throws DomainError otherwise.
SystemKind parse_system_kind(std::string_view name);

/// Nonlinearity coefficients, dispersion symbol and energy-space index of
/// one system.
///
///   kdv    R = B1 u^3/3 + B2 u^2 v/2 + B3 u v^2 + B4 v^3/3,        M = -d_xx
///   mkdv   R = D1 u^4/4 + D2 u^3 v/3 + D3 u^2 v^2/2 + D4 u v^3 + D5 v^4/4
///   logkdv R = u v log(u^2 v^2)/2 - u v
///   lkk    R = (u^3 + v^3)/6, M with the Liu-Kubota-Ko symbol at W = 1/H
class SystemSpec {
 public:
  static SystemSpec kdv(const std::array<double, 4>& b);
  static SystemSpec mkdv(const std::array<double, 5>& d);
  static SystemSpec logkdv();
  static SystemSpec lkk(double w);
  /// Builds from a kind and a flat coefficient list (B1..B4, D1..D5, none, {W}).
  static SystemSpec from_coefficients(SystemKind kind, const std::vector<double>& coeffs);

  SystemKind kind() const noexcept { return kind_; }
  const std::vector<double>& coefficients() const noexcept { return coeffs_; }
  /// W for the lkk system, 0 otherwise.
  double depth_inverse() const noexcept { return w_; }
  /// Index s of the energy space H^{s/2} x H^{s/2}.
  double sobolev_index() const noexcept;

  SymbolMatrix dispersion(double length) const;

  double potential(double u1, double u2) const;
  std::array<double, 2> gradient(double u1, double u2) const;
  Sym2 hessian(double u1, double u2) const;

  bool operator==(const SystemSpec&) const = default;

 private:
  SystemSpec(SystemKind kind, std::vector<double> coeffs, double w);
  SystemKind kind_;
  std::vector<double> coeffs_;
  double w_ = 0.0;
};

}  // namespace pwstab
