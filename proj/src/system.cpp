#include "pwstab/system.hpp"

#include <cmath>

#include "pwstab/errors.hpp"

namespace pwstab {
namespace {

void require_positive(double u1, double u2) {
  if (!(u1 > 0.0) || !(u2 > 0.0)) {
    throw DomainError("log-KdV nonlinearity requires strictly positive components");
  }
}

}  // namespace

std::string_view to_string(SystemKind kind) {
  switch (kind) {
    case SystemKind::kdv: return "kdv";
    case SystemKind::mkdv: return "mkdv";
    case SystemKind::logkdv: return "logkdv";
    case SystemKind::lkk: return "lkk";
  }
  return "unknown";
}

SystemKind parse_system_kind(std::string_view name) {
  if (name == "kdv") return SystemKind::kdv;
  if (name == "mkdv") return SystemKind::mkdv;
  if (name == "logkdv") return SystemKind::logkdv;
  if (name == "lkk") return SystemKind::lkk;
  throw DomainError("unknown system '" + std::string(name) + "'");
}

SystemSpec::SystemSpec(SystemKind kind, std::vector<double> coeffs, double w)
    : kind_(kind), coeffs_(std::move(coeffs)), w_(w) {
  for (double c : coeffs_) {
    if (!std::isfinite(c)) throw DomainError("system coefficients must be finite");
  }
  if (w_ < 0.0 || !std::isfinite(w_)) throw DomainError("lkk parameter W must be >= 0");
}

SystemSpec SystemSpec::kdv(const std::array<double, 4>& b) {
  return {SystemKind::kdv, {b.begin(), b.end()}, 0.0};
}

SystemSpec SystemSpec::mkdv(const std::array<double, 5>& d) {
  return {SystemKind::mkdv, {d.begin(), d.end()}, 0.0};
}

SystemSpec SystemSpec::logkdv() { return {SystemKind::logkdv, {}, 0.0}; }

SystemSpec SystemSpec::lkk(double w) { return {SystemKind::lkk, {}, w}; }

SystemSpec SystemSpec::from_coefficients(SystemKind kind, const std::vector<double>& coeffs) {
  switch (kind) {
    case SystemKind::kdv:
      if (coeffs.size() != 4) throw DomainError("kdv needs four coefficients B1..B4");
      return kdv({coeffs[0], coeffs[1], coeffs[2], coeffs[3]});
    case SystemKind::mkdv:
      if (coeffs.size() != 5) throw DomainError("mkdv needs five coefficients D1..D5");
      return mkdv({coeffs[0], coeffs[1], coeffs[2], coeffs[3], coeffs[4]});
    case SystemKind::logkdv:
      if (!coeffs.empty()) throw DomainError("logkdv takes no coefficients");
      return logkdv();
    case SystemKind::lkk:
      if (coeffs.size() != 1) throw DomainError("lkk takes the single coefficient W");
      return lkk(coeffs[0]);
  }
  throw DomainError("unknown system kind");
}

double SystemSpec::sobolev_index() const noexcept {
  return kind_ == SystemKind::lkk ? 1.0 : 2.0;
}

SymbolMatrix SystemSpec::dispersion(double length) const {
  if (kind_ == SystemKind::lkk) return SymbolMatrix::lkk(w_, length);
  return SymbolMatrix::laplacian(length);
}

double SystemSpec::potential(double u, double v) const {
  const auto& c = coeffs_;
  switch (kind_) {
    case SystemKind::kdv:
      return c[0] * u * u * u / 3.0 + 0.5 * c[1] * u * u * v + c[2] * u * v * v +
             c[3] * v * v * v / 3.0;
    case SystemKind::mkdv:
      return 0.25 * c[0] * u * u * u * u + c[1] * u * u * u * v / 3.0 + 0.5 * c[2] * u * u * v * v +
             c[3] * u * v * v * v + 0.25 * c[4] * v * v * v * v;
    case SystemKind::logkdv:
      require_positive(u, v);
      return 0.5 * u * v * std::log(u * u * v * v) - u * v;
    case SystemKind::lkk:
      return (u * u * u + v * v * v) / 6.0;
  }
  return 0.0;
}

std::array<double, 2> SystemSpec::gradient(double u, double v) const {
  const auto& c = coeffs_;
  switch (kind_) {
    case SystemKind::kdv:
      return {c[0] * u * u + c[1] * u * v + c[2] * v * v,
              0.5 * c[1] * u * u + 2.0 * c[2] * u * v + c[3] * v * v};
    case SystemKind::mkdv:
      return {c[0] * u * u * u + c[1] * u * u * v + c[2] * u * v * v + c[3] * v * v * v,
              c[1] * u * u * u / 3.0 + c[2] * u * u * v + 3.0 * c[3] * u * v * v +
                  c[4] * v * v * v};
    case SystemKind::logkdv: {
      require_positive(u, v);
      const double lg = 0.5 * std::log(u * u * v * v);
      return {v * lg, u * lg};
    }
    case SystemKind::lkk:
      return {0.5 * u * u, 0.5 * v * v};
  }
  return {0.0, 0.0};
}

Sym2 SystemSpec::hessian(double u, double v) const {
  const auto& c = coeffs_;
  switch (kind_) {
    case SystemKind::kdv:
      return {2.0 * c[0] * u + c[1] * v, c[1] * u + 2.0 * c[2] * v, 2.0 * c[2] * u + 2.0 * c[3] * v};
    case SystemKind::mkdv:
      return {3.0 * c[0] * u * u + 2.0 * c[1] * u * v + c[2] * v * v,
              c[1] * u * u + 2.0 * c[2] * u * v + 3.0 * c[3] * v * v,
              c[2] * u * u + 6.0 * c[3] * u * v + 3.0 * c[4] * v * v};
    case SystemKind::logkdv:
      require_positive(u, v);
      return {v / u, 1.0 + 0.5 * std::log(u * u * v * v), u / v};
    case SystemKind::lkk:
      return {u, 0.0, v};
  }
  return {};
}

}  // namespace pwstab
