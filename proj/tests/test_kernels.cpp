#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "minlen/kernels.hpp"
#include "minlen/numerics.hpp"

using namespace minlen;
using cd = std::complex<double>;

TEST_CASE("panel Fourier sum of a box and a parabola") {
  // f = 1 - t^2 on [-1, 1], split over 4 panels
  const int order = 6, panels = 4;
  const double lower = -1, width = 0.5;
  std::vector<cd> coeffs(order * panels);
  const auto& rule = num::gauss_legendre(order);
  for (int p = 0; p < panels; ++p) {
    std::vector<cd> v(order);
    for (int i = 0; i < order; ++i) {
      const double t = lower + (p + 0.5 + 0.5 * rule.x[i]) * width;
      v[i] = 1 - t * t;
    }
    num::legendre_fit<cd>(v, rule, std::span<cd>(coeffs.data() + p * order, order));
  }
  kernels::PanelSeries f{lower, width, panels, order, coeffs};
  std::vector<double> x{0.0, 0.3, 1.0, 7.5, -40.0};
  std::vector<cd> a(x.size()), b(x.size());
  kernels::fourier_serial(f, 1.0, x, a);
  kernels::fourier_parallel(f, 1.0, x, b);
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double w = x[j];
    // int (1-t^2) cos(wt) = 4 (sin w - w cos w) / w^3
    const double exact = w == 0 ? 4.0 / 3 : 4 * (std::sin(w) - w * std::cos(w)) / (w * w * w);
    CHECK(std::abs(a[j] - exact) < 1e-13);
    CHECK(a[j] == b[j]);
  }
}

TEST_CASE("Gaussian blocks reproduce the convolution of two Gaussians") {
  // rho = N(0, 1) cut into blocks of width 0.05, smeared with sigma = 0.5
  const double sigma = 0.5, h = 0.05;
  std::vector<kernels::MomentBlock> blocks;
  const auto& rule = num::gauss_legendre(16);
  for (double lo = -12; lo < 12 - 1e-12; lo += h) {
    kernels::MomentBlock b{lo + h / 2, lo, lo + h, {}};
    for (int i = 0; i < rule.size(); ++i) {
      const double t = b.center + 0.5 * h * rule.x[i];
      const double r = std::exp(-t * t / 2) / std::sqrt(2 * num::kPi) * 0.5 * h * rule.w[i];
      double d = 1;
      for (int k = 0; k < kernels::kBlockMoments; ++k, d *= t - b.center) b.m[k] += r * d;
    }
    blocks.push_back(b);
  }
  std::vector<double> z{0.0, 0.7, -2.0, 4.0}, a(z.size(), 0.0), c(z.size(), 0.0);
  kernels::gaussian_blocks_serial(blocks, sigma, z, a);
  kernels::gaussian_blocks_parallel(blocks, sigma, z, c);
  const double s2 = 1 + sigma * sigma;
  for (std::size_t j = 0; j < z.size(); ++j) {
    const double exact = std::exp(-z[j] * z[j] / (2 * s2)) / std::sqrt(2 * num::kPi * s2);
    CHECK(std::abs(a[j] - exact) < 1e-13);
    CHECK(std::abs(a[j] - c[j]) <= 1e-16);
  }
}
