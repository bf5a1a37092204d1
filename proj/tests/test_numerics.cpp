#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "minlen/numerics.hpp"

using namespace minlen;

TEST_CASE("Gauss-Legendre rule integrates polynomials of degree 2n-1 exactly") {
  for (int n : {1, 2, 5, 12, 20}) {
    const auto& r = num::gauss_legendre(n);
    for (int d = 0; d < 2 * n; ++d) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += r.w[i] * std::pow(r.x[i], d);
      const double exact = d % 2 ? 0.0 : 2.0 / (d + 1);
      CHECK(s == doctest::Approx(exact).epsilon(1e-13));
    }
  }
}

TEST_CASE("Legendre interpolant reproduces the sampled function and its integral") {
  const auto& r = num::gauss_legendre(12);
  std::vector<double> v(12), c(12);
  for (int i = 0; i < 12; ++i) v[i] = std::exp(r.x[i]);
  num::legendre_fit<double>(v, r, c);
  for (double x : {-0.9, -0.3, 0.0, 0.77}) {
    CHECK(num::legendre_series<double>(c, x) == doctest::Approx(std::exp(x)).epsilon(1e-11));
    CHECK(num::legendre_series_derivative<double>(c, x) ==
          doctest::Approx(std::exp(x)).epsilon(1e-10));
    CHECK(num::legendre_series_integral(c, x) ==
          doctest::Approx(std::exp(x) - std::exp(-1.0)).epsilon(1e-13));
  }
}

TEST_CASE("spherical Bessel values agree with the standard library") {
  for (double w : {1e-3, 0.3, 0.9, 2.5, 7.0, 15.0, 40.0, 300.0, -3.7}) {
    std::vector<double> j(20);
    num::spherical_bessel(w, j);
    for (int n = 0; n < 20; ++n) {
      double ref = std::sph_bessel(n, std::abs(w));
      if (w < 0 && n % 2) ref = -ref;
      CHECK(std::abs(j[n] - ref) <= 1e-10 * std::abs(ref) + 1e-14);
    }
  }
}

TEST_CASE("Legendre Fourier moments match direct quadrature") {
  const auto& r = num::gauss_legendre(60);
  for (double w : {0.0, 0.4, 3.0, 25.0}) {
    std::vector<std::complex<double>> m(10);
    num::legendre_fourier_moments(w, m);
    for (int n = 0; n < 10; ++n) {
      std::complex<double> s = 0;
      for (int i = 0; i < r.size(); ++i) {
        std::vector<double> p(n + 1);
        num::legendre_values(r.x[i], p);
        s += r.w[i] * p[n] * std::exp(std::complex<double>(0, w * r.x[i]));
      }
      CHECK(std::abs(m[n] - s) < 1e-12);
    }
  }
}

TEST_CASE("sine and cosine integrals match tabulated values") {
  struct Row { double x, si, ci; };
  const Row rows[] = {{0.5, 0.49310741804306674, -0.17778407880661287},
                      {3.0, 1.848652527999468, 0.11962978600800067},
                      {50.0, 1.551617072485936, -0.005628386324116305}};
  for (const Row& row : rows) {
    double si, ci;
    num::sine_cosine_integrals(row.x, si, ci);
    CHECK(si == doctest::Approx(row.si).epsilon(1e-13));
    CHECK(ci == doctest::Approx(row.ci).epsilon(1e-11));
  }
}

TEST_CASE("adaptive integration handles a peaked integrand") {
  double err = 0;
  const double v = num::integrate_adaptive([](double x) { return 1.0 / (1e-4 + x * x); }, -1.0,
                                           1.0, 1e-12, 1e-12, 40, &err);
  CHECK(v == doctest::Approx(2.0 / 1e-2 * std::atan(1.0 / 1e-2)).epsilon(1e-11));
  CHECK(err < 1e-9);
}

TEST_CASE("Gauss-Hermite rule") {
  for (int n : {1, 5, 20, 40}) {
    const num::GaussRule& r = num::gauss_hermite(n);
    double m0 = 0.0, m2 = 0.0, m4 = 0.0;
    for (int i = 0; i < r.size(); ++i) {
      m0 += r.w[i];
      m2 += r.w[i] * r.x[i] * r.x[i];
      m4 += r.w[i] * std::pow(r.x[i], 4);
      if (i > 0) CHECK(r.x[i] > r.x[i - 1]);
    }
    const double sp = std::sqrt(num::kPi);
    CHECK(m0 == doctest::Approx(sp).epsilon(1e-14));
    if (n >= 2) CHECK(m2 == doctest::Approx(sp / 2).epsilon(1e-13));
    if (n >= 3) CHECK(m4 == doctest::Approx(3 * sp / 4).epsilon(1e-13));
  }
  // exact for cos up to the rule's resolution: int e^{-x^2} cos(x) = sqrt(pi) e^{-1/4}
  const num::GaussRule& r = num::gauss_hermite(20);
  double c = 0.0;
  for (int i = 0; i < r.size(); ++i) c += r.w[i] * std::cos(r.x[i]);
  CHECK(c == doctest::Approx(std::sqrt(num::kPi) * std::exp(-0.25)).epsilon(1e-14));
}
