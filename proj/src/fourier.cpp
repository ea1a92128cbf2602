#include "pwstab/fourier.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "pwstab/errors.hpp"

namespace pwstab {
namespace {

struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;
};

// FFTW planning is not thread safe, execution with the new-array interface is.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [n, plans] : plans_) {
      fftw_destroy_plan(plans.forward);
      fftw_destroy_plan(plans.inverse);
    }
  }

  const PlanPair& get(int n) {
    std::lock_guard lock(mutex_);
    auto it = plans_.find(n);
    if (it != plans_.end()) return it->second;
    std::vector<double> real(n);
    std::vector<Complex> spectrum(n / 2 + 1);
    auto* out = reinterpret_cast<fftw_complex*>(spectrum.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    PlanPair plans;
    plans.forward = fftw_plan_dft_r2c_1d(n, real.data(), out, flags);
    plans.inverse = fftw_plan_dft_c2r_1d(n, out, real.data(), flags);
    return plans_.emplace(n, plans).first->second;
  }

 private:
  std::mutex mutex_;
  std::map<int, PlanPair> plans_;
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

}  // namespace

bool is_power_of_two(int n) noexcept { return n > 0 && (n & (n - 1)) == 0; }

PeriodicGrid::PeriodicGrid(int n, double length) : n_(n), length_(length) {
  if (!is_power_of_two(n) || n < 8) {
    throw DomainError("grid size must be a power of two >= 8");
  }
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw DomainError("period must be positive and finite");
  }
}

RealVector PeriodicGrid::points() const {
  RealVector x(n_);
  for (int j = 0; j < n_; ++j) x[j] = point(j);
  return x;
}

double PeriodicGrid::frequency(int kappa) const noexcept {
  return 2.0 * std::numbers::pi * kappa / length_;
}

ComplexVector forward_fft(std::span<const double> values) {
  const int n = static_cast<int>(values.size());
  if (!is_power_of_two(n)) throw ShapeError("forward_fft: length must be a power of two");
  const auto& plans = plan_cache().get(n);
  std::vector<double> input(values.begin(), values.end());
  ComplexVector out(n / 2 + 1);
  fftw_execute_dft_r2c(plans.forward, input.data(),
                       reinterpret_cast<fftw_complex*>(out.data()));
  const double scale = 1.0 / n;
  for (auto& c : out) c *= scale;
  return out;
}

RealVector inverse_fft(std::span<const Complex> coeffs, int n) {
  if (!is_power_of_two(n) || static_cast<int>(coeffs.size()) != n / 2 + 1) {
    throw ShapeError("inverse_fft: expected N/2 + 1 coefficients for power-of-two N");
  }
  const auto& plans = plan_cache().get(n);
  ComplexVector scratch(coeffs.begin(), coeffs.end());
  scratch.front().imag(0.0);
  scratch.back().imag(0.0);
  RealVector out(n);
  fftw_execute_dft_c2r(plans.inverse, reinterpret_cast<fftw_complex*>(scratch.data()),
                       out.data());
  return out;
}

RealVector spectral_derivative(std::span<const double> f, double length, int order) {
  const int n = static_cast<int>(f.size());
  auto coeffs = forward_fft(f);
  const PeriodicGrid grid(n, length);
  const Complex i_unit(0.0, 1.0);
  for (int k = 0; k < grid.modes(); ++k) {
    const bool nyquist = (k == n / 2);
    if (nyquist && order % 2 == 1) {
      coeffs[k] = 0.0;
      continue;
    }
    coeffs[k] *= std::pow(i_unit * grid.frequency(k), order);
  }
  return inverse_fft(coeffs, n);
}

RealVector translate(std::span<const double> f, double length, double shift) {
  const int n = static_cast<int>(f.size());
  auto coeffs = forward_fft(f);
  const PeriodicGrid grid(n, length);
  for (int k = 0; k < grid.modes(); ++k) {
    const double phase = grid.frequency(k) * shift;
    if (k == n / 2) {
      coeffs[k] *= std::cos(phase);
    } else {
      coeffs[k] *= std::polar(1.0, phase);
    }
  }
  return inverse_fft(coeffs, n);
}

double inner_product(std::span<const double> f, std::span<const double> g, double length) {
  if (f.size() != g.size()) throw ShapeError("inner_product: length mismatch");
  double sum = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) sum += f[j] * g[j];
  return sum * length / static_cast<double>(f.size());
}

double l2_norm(std::span<const double> f, double length) {
  return std::sqrt(inner_product(f, f, length));
}

double max_abs(std::span<const double> f) {
  double m = 0.0;
  for (double v : f) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace pwstab
