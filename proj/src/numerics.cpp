#include "minlen/numerics.hpp"

#include <algorithm>
#include <array>
#include <cassert>
#include <limits>
#include <map>
#include <memory>
#include <mutex>

namespace minlen::num {

namespace {

GaussRule make_rule(int n) {
  GaussRule rule;
  rule.x.resize(n);
  rule.w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      if (n == 1) {
        p1 = x;
        p0 = 1.0;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute derivative at the converged node
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.x[i] = -x;
    rule.x[n - 1 - i] = x;
    rule.w[i] = w;
    rule.w[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.x[n / 2] = 0.0;
  return rule;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<GaussRule>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, std::make_unique<GaussRule>(make_rule(n))).first;
  return *it->second;
}

namespace {

// Newton iteration on the orthonormal Hermite recurrence, largest root first.
GaussRule make_hermite_rule(int n) {
  GaussRule r;
  r.x.assign(n, 0.0);
  r.w.assign(n, 0.0);
  const double pim4 = std::pow(kPi, -0.25);
  double z = 0.0;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    if (i == 0) z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
    else if (i == 1) z -= 1.14 * std::pow(n, 0.426) / z;
    else if (i == 2) z = 1.86 * z - 0.86 * r.x[0];
    else if (i == 3) z = 1.91 * z - 0.91 * r.x[1];
    else z = 2.0 * z - r.x[i - 2];
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = pim4, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double dz = p1 / pp;
      z -= dz;
      if (std::abs(dz) <= 1e-15 * std::max(1.0, std::abs(z))) break;
    }
    r.x[i] = z;
    r.x[n - 1 - i] = -z;
    r.w[i] = r.w[n - 1 - i] = 2.0 / (pp * pp);
  }
  std::reverse(r.x.begin(), r.x.end());
  std::reverse(r.w.begin(), r.w.end());
  return r;
}

}  // namespace

const GaussRule& gauss_hermite(int n) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<GaussRule>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, std::make_unique<GaussRule>(make_hermite_rule(n))).first;
  return *it->second;
}

void legendre_values(double x, std::span<double> out) {
  const std::size_t n = out.size();
  if (n == 0) return;
  out[0] = 1.0;
  if (n == 1) return;
  out[1] = x;
  for (std::size_t k = 2; k < n; ++k)
    out[k] = ((2.0 * k - 1.0) * x * out[k - 1] - (k - 1.0) * out[k - 2]) / k;
}

template <class T>
void legendre_fit(std::span<const T> values, const GaussRule& rule, std::span<T> coeffs) {
  const int n = rule.size();
  assert(static_cast<int>(values.size()) == n);
  std::fill(coeffs.begin(), coeffs.end(), T{});
  std::array<double, 128> p{};
  const int m = std::min<int>(static_cast<int>(coeffs.size()), n);
  for (int i = 0; i < n; ++i) {
    legendre_values(rule.x[i], std::span<double>(p.data(), m));
    for (int k = 0; k < m; ++k) coeffs[k] += rule.w[i] * p[k] * values[i];
  }
  for (int k = 0; k < m; ++k) coeffs[k] *= (2.0 * k + 1.0) / 2.0;
}

template <class T>
T legendre_series(std::span<const T> c, double x) {
  // Clenshaw: b_k = c_k + alpha_k b_{k+1} + beta_{k+1} b_{k+2}
  T b1{}, b2{};
  for (int k = static_cast<int>(c.size()) - 1; k >= 1; --k) {
    const double alpha = (2.0 * k + 1.0) / (k + 1.0) * x;
    const double beta = -(k + 1.0) / (k + 2.0);
    T bk = c[k] + alpha * b1 + beta * b2;
    b2 = b1;
    b1 = bk;
  }
  if (c.empty()) return T{};
  return c[0] + x * b1 - 0.5 * b2;
}

template <class T>
T legendre_series_derivative(std::span<const T> c, double x) {
  // P_n'(x) via the recurrence P'_{k+1} = P'_{k-1} + (2k+1) P_k.
  const std::size_t n = c.size();
  std::array<double, 128> p{};
  std::array<double, 128> dp{};
  legendre_values(x, std::span<double>(p.data(), n));
  T sum{};
  for (std::size_t k = 0; k < n; ++k) {
    if (k == 0) dp[k] = 0.0;
    else if (k == 1) dp[k] = 1.0;
    else dp[k] = dp[k - 2] + (2.0 * k - 1.0) * p[k - 1];
    sum += c[k] * dp[k];
  }
  return sum;
}

double legendre_series_integral(std::span<const double> c, double x) {
  // int_{-1}^x P_0 = x + 1; int_{-1}^x P_n = (P_{n+1}(x) - P_{n-1}(x)) / (2n + 1).
  const std::size_t n = c.size();
  std::array<double, 130> p{};
  legendre_values(x, std::span<double>(p.data(), n + 1));
  double sum = c.empty() ? 0.0 : c[0] * (x + 1.0);
  for (std::size_t k = 1; k < n; ++k) sum += c[k] * (p[k + 1] - p[k - 1]) / (2.0 * k + 1.0);
  return sum;
}

template void legendre_fit<double>(std::span<const double>, const GaussRule&, std::span<double>);
template void legendre_fit<std::complex<double>>(std::span<const std::complex<double>>,
                                                 const GaussRule&,
                                                 std::span<std::complex<double>>);
template double legendre_series<double>(std::span<const double>, double);
template std::complex<double> legendre_series<std::complex<double>>(
    std::span<const std::complex<double>>, double);
template double legendre_series_derivative<double>(std::span<const double>, double);
template std::complex<double> legendre_series_derivative<std::complex<double>>(
    std::span<const std::complex<double>>, double);

void spherical_bessel(double w, std::span<double> out) {
  const int n = static_cast<int>(out.size());
  if (n == 0) return;
  const double aw = std::abs(w);
  if (aw < 0.5) {
    // power series j_n(w) = w^n / (2n+1)!! * sum_k (-w^2/2)^k / (k! (2n+3)(2n+5)...(2n+2k+1))
    double lead = 1.0;  // w^n / (2n+1)!!
    const double z = -0.5 * aw * aw;
    for (int k = 0; k < n; ++k) {
      if (k > 0) lead *= aw / (2.0 * k + 1.0);
      double term = lead, sum = lead;
      for (int m = 1; m < 30; ++m) {
        term *= z / (m * (2.0 * k + 2.0 * m + 1.0));
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum)) break;
      }
      out[k] = sum;
    }
  } else if (aw > n + 1.0) {
    const double s = std::sin(aw), c = std::cos(aw);
    out[0] = s / aw;
    if (n > 1) out[1] = s / (aw * aw) - c / aw;
    for (int k = 2; k < n; ++k) out[k] = (2.0 * k - 1.0) / aw * out[k - 1] - out[k - 2];
  } else {
    // Miller's downward recurrence, normalized against j_0 or j_1.
    const int start = n + 24 + static_cast<int>(aw);
    std::array<double, 320> buf{};
    buf[start] = 1e-300;
    for (int k = start; k >= 1; --k) {
      buf[k - 1] = (2.0 * k + 1.0) / aw * buf[k] - buf[k + 1];
      if (std::abs(buf[k - 1]) > 1e250)
        for (int m = k - 1; m <= start; ++m) buf[m] *= 1e-250;
    }
    for (int k = 0; k < n; ++k) out[k] = buf[k];
    const double s = std::sin(aw), c = std::cos(aw);
    const double j0 = s / aw;
    const double j1 = s / (aw * aw) - c / aw;
    double scale;
    if (n < 2 || std::abs(j0) >= std::abs(j1)) scale = j0 / out[0];
    else scale = j1 / out[1];
    for (int k = 0; k < n; ++k) out[k] *= scale;
  }
  if (w < 0.0)
    for (int k = 1; k < n; k += 2) out[k] = -out[k];
}

void legendre_fourier_moments(double w, std::span<std::complex<double>> out) {
  std::array<double, 128> j{};
  const std::size_t n = out.size();
  spherical_bessel(w, std::span<double>(j.data(), n));
  static const std::complex<double> ipow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  for (std::size_t k = 0; k < n; ++k) out[k] = 2.0 * ipow[k % 4] * j[k];
}

namespace {

double gl_panel(const std::function<double(double)>& f, double a, double b) {
  const GaussRule& r = gauss_legendre(20);
  const double h = 0.5 * (b - a), m = 0.5 * (a + b);
  double s = 0.0;
  for (int i = 0; i < r.size(); ++i) s += r.w[i] * f(m + h * r.x[i]);
  return s * h;
}

double adapt(const std::function<double(double)>& f, double a, double b, double whole,
             double tol, int depth, double& err) {
  const double m = 0.5 * (a + b);
  const double left = gl_panel(f, a, m);
  const double right = gl_panel(f, m, b);
  const double diff = std::abs(left + right - whole);
  if (diff <= tol || depth <= 0) {
    err += diff;
    return left + right;
  }
  return adapt(f, a, m, left, 0.5 * tol, depth - 1, err) +
         adapt(f, m, b, right, 0.5 * tol, depth - 1, err);
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double abs_tol, double rel_tol, int max_depth, double* error) {
  if (a == b) return 0.0;
  const double whole = gl_panel(f, a, b);
  const double tol = std::max(abs_tol, rel_tol * std::abs(whole));
  double err = 0.0;
  const double value = adapt(f, a, b, whole, tol, max_depth, err);
  if (error) *error = err;
  return value;
}

void sine_cosine_integrals(double x, double& si, double& ci) {
  constexpr double euler = 0.57721566490153286061;
  if (x <= 0.0) {
    si = 0.0;
    ci = -std::numeric_limits<double>::infinity();
    return;
  }
  if (x < 2.0) {
    double term = x, sum_s = x;
    double sum_c = 0.0, tc = 1.0;
    for (int k = 1; k < 60; ++k) {
      term *= -x * x / ((2.0 * k) * (2.0 * k + 1.0));
      sum_s += term / (2.0 * k + 1.0);
      tc *= -x * x / ((2.0 * k - 1.0) * (2.0 * k));
      sum_c += tc / (2.0 * k);
      if (std::abs(term) < 1e-18 && std::abs(tc) < 1e-18) break;
    }
    si = sum_s;
    ci = euler + std::log(x) + sum_c;
    return;
  }
  // E1(ix) by modified Lentz continued fraction.
  using cd = std::complex<double>;
  const double fpmin = 1e-300;
  cd b(1.0, x);
  cd c(1.0 / fpmin, 0.0);
  cd d = 1.0 / b;
  cd h = d;
  for (int i = 1; i < 1000; ++i) {
    const double a = -static_cast<double>(i) * i;
    b += 2.0;
    d = 1.0 / (a * d + b);
    c = b + a / c;
    const cd del = c * d;
    h *= del;
    if (std::abs(del.real() - 1.0) + std::abs(del.imag()) < 1e-16) break;
  }
  h *= cd(std::cos(x), -std::sin(x));
  ci = -h.real();
  si = 0.5 * kPi + h.imag();
}

}  // namespace minlen::num
