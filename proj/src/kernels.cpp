#include "minlen/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "minlen/numerics.hpp"

namespace minlen::kernels {

namespace {

using cd = std::complex<double>;

cd fourier_point(const PanelSeries& f, double sign, double x) {
  const double w = sign * x;
  std::array<cd, 64> mom{};
  num::legendre_fourier_moments(0.5 * w * f.width, std::span<cd>(mom.data(), f.order));
  const cd step = std::polar(1.0, w * f.width);
  const double c0 = f.lower + 0.5 * f.width;
  cd rot = std::polar(1.0, w * c0);
  cd sum = 0.0;
  for (int p = 0; p < f.panels; ++p) {
    const cd* c = f.coeffs.data() + static_cast<std::size_t>(p) * f.order;
    cd s = 0.0;
    for (int n = 0; n < f.order; ++n) s += c[n] * mom[n];
    sum += rot * s;
    rot *= step;
    if (p % 32 == 31) rot = std::polar(1.0, w * (c0 + (p + 1) * f.width));
  }
  return 0.5 * f.width * sum;
}

double gaussian_point(std::span<const MomentBlock> blocks, double sigma, double z) {
  const double reach = 10.0 * sigma;
  const double norm = 1.0 / (sigma * std::sqrt(2.0 * num::kPi));
  auto first = std::lower_bound(blocks.begin(), blocks.end(), z - reach - sigma,
                                [](const MomentBlock& b, double v) { return b.center < v; });
  double sum = 0.0;
  for (auto it = first; it != blocks.end() && it->center <= z + reach + sigma; ++it) {
    const double y = (z - it->center) / sigma;
    if (std::abs(y) > 10.0) continue;
    // sum_k He_k(y) m_k / (sigma^k k!)
    double h0 = 1.0, h1 = y;
    double scale = 1.0;
    double s = it->m[0] + h1 * it->m[1] / sigma;
    for (int k = 1; k + 1 < kBlockMoments; ++k) {
      const double h2 = y * h1 - k * h0;
      scale /= sigma * (k + 1);
      h0 = h1;
      h1 = h2;
      s += h2 * it->m[k + 1] * scale / sigma;
    }
    sum += s * std::exp(-0.5 * y * y);
  }
  return norm * sum;
}

}  // namespace

void fourier_serial(const PanelSeries& f, double sign, std::span<const double> x,
                    std::span<std::complex<double>> out) {
  for (std::size_t j = 0; j < x.size(); ++j) out[j] = fourier_point(f, sign, x[j]);
}

void fourier_parallel(const PanelSeries& f, double sign, std::span<const double> x,
                      std::span<std::complex<double>> out) {
  const auto n = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t j = 0; j < n; ++j) out[j] = fourier_point(f, sign, x[j]);
}

void gaussian_blocks_serial(std::span<const MomentBlock> blocks, double sigma,
                            std::span<const double> zeta, std::span<double> out) {
  for (std::size_t j = 0; j < zeta.size(); ++j) out[j] += gaussian_point(blocks, sigma, zeta[j]);
}

void gaussian_blocks_parallel(std::span<const MomentBlock> blocks, double sigma,
                              std::span<const double> zeta, std::span<double> out) {
  const auto n = static_cast<std::ptrdiff_t>(zeta.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (std::ptrdiff_t j = 0; j < n; ++j) out[j] += gaussian_point(blocks, sigma, zeta[j]);
}

}  // namespace minlen::kernels
