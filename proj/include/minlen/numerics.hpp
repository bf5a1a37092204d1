#pragma once

// Low-level quadrature and special-function helpers shared by the modules.

#include <cmath>
#include <complex>
#include <functional>
#include <span>
#include <vector>

namespace minlen::num {

inline constexpr double kPi = 3.14159265358979323846;

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> x;
  std::vector<double> w;
  int size() const { return static_cast<int>(x.size()); }
};

/// Cached n-point rule; thread-safe after first use of each n.
const GaussRule& gauss_legendre(int n);

/// Gauss-Hermite rule for the weight exp(-x^2) on the real line.
const GaussRule& gauss_hermite(int n);

/// Values of P_0..P_{n-1} at x.
void legendre_values(double x, std::span<double> out);

/// Coefficients of the degree-(n-1) Legendre interpolant through values at the
/// nodes of `rule`.
template <class T>
void legendre_fit(std::span<const T> values, const GaussRule& rule, std::span<T> coeffs);

/// Evaluates sum_n c_n P_n(x) by Clenshaw recurrence.
template <class T>
T legendre_series(std::span<const T> c, double x);

/// Integral of the Legendre series from -1 to x.
double legendre_series_integral(std::span<const double> c, double x);

/// Derivative of the Legendre series at x.
template <class T>
T legendre_series_derivative(std::span<const T> c, double x);

/// Spherical Bessel functions j_0..j_{n-1}(w) written to `out`.
void spherical_bessel(double w, std::span<double> out);

/// Integral over [-1, 1] of P_n(t) exp(i w t) for n = 0..size-1, which equals
/// 2 i^n j_n(w).
void legendre_fourier_moments(double w, std::span<std::complex<double>> out);

/// Globally adaptive Gauss-Legendre integration (20-point rule against its two
/// halves).  Returns the integral; `error` receives the accumulated estimate.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double abs_tol, double rel_tol, int max_depth = 40,
                          double* error = nullptr);

/// Sine and cosine integrals Si(x), Ci(x) for x > 0.
void sine_cosine_integrals(double x, double& si, double& ci);

/// x ln x with the 0 ln 0 = 0 convention.
inline double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

}  // namespace minlen::num
