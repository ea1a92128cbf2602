#pragma once

#include <complex>
#include <span>
#include <vector>

namespace pwstab {

using Complex = std::complex<double>;
using RealVector = std::vector<double>;
using ComplexVector = std::vector<Complex>;

bool is_power_of_two(int n) noexcept;

/// Uniform periodic grid x_j = j L / N on [0, L).
class PeriodicGrid {
 public:
  /// Throws DomainError unless N is a power of two >= 8 and L > 0.
  PeriodicGrid(int n, double length);

  int size() const noexcept { return n_; }
  double length() const noexcept { return length_; }
  double spacing() const noexcept { return length_ / n_; }
  double point(int j) const noexcept { return j * spacing(); }
  RealVector points() const;
  /// Number of non-negative modes kept by the real transform, N/2 + 1.
  int modes() const noexcept { return n_ / 2 + 1; }
  /// Physical frequency 2 pi kappa / L of integer mode kappa.
  double frequency(int kappa) const noexcept;

 private:
  int n_;
  double length_;
};

/// Normalised real-to-complex transform c_k = (1/N) sum_j f_j exp(-2 pi i k j / N)
/// for k = 0..N/2.
ComplexVector forward_fft(std::span<const double> values);

/// Inverse of forward_fft. The imaginary parts of the k = 0 and Nyquist
/// coefficients are ignored, so the output is real by construction.
RealVector inverse_fft(std::span<const Complex> coeffs, int n);

/// d^order f / dx^order by Fourier multiplication. Odd orders drop the
/// Nyquist mode so the result stays real and symmetric.
RealVector spectral_derivative(std::span<const double> f, double length, int order);

/// Spectral interpolant of f evaluated at x + shift for every grid point.
RealVector translate(std::span<const double> f, double length, double shift);

/// Trapezoid inner product (L / N) sum f_j g_j, exact for trigonometric
/// polynomials of degree < N.
double inner_product(std::span<const double> f, std::span<const double> g, double length);
double l2_norm(std::span<const double> f, double length);

/// Largest |f_j|.
double max_abs(std::span<const double> f);

}  // namespace pwstab
