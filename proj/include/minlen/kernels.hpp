#pragma once

// Data-parallel inner loops.  Each kernel has a serial reference and an OpenMP
// version that must agree with it to rounding; tests and the benchmark compare
// the two.

#include <array>
#include <complex>
#include <span>

namespace minlen::kernels {

/// A function given on `panels` equal panels of [lower, lower + panels*width]
/// by Legendre coefficients (`order` per panel, panel-major).
struct PanelSeries {
  double lower;
  double width;
  int panels;
  int order;
  std::span<const std::complex<double>> coeffs;
};

/// out[j] = int f(t) exp(i sign x[j] t) dt, exact for the piecewise polynomial.
void fourier_serial(const PanelSeries& f, double sign, std::span<const double> x,
                    std::span<std::complex<double>> out);
void fourier_parallel(const PanelSeries& f, double sign, std::span<const double> x,
                      std::span<std::complex<double>> out);

inline constexpr int kBlockMoments = 10;

/// Mass moments of a stretch of a density about `center`:
/// m[k] = int (t - center)^k rho(t) dt over [lo, hi].
struct MomentBlock {
  double center;
  double lo;
  double hi;
  std::array<double, kBlockMoments> m;
};

/// out[j] += sum over blocks of int N(zeta[j] - t; sigma) rho(t) dt, using the
/// Hermite expansion of the Gaussian about each block centre.  Blocks must be
/// sorted by centre and no wider than sigma/8; blocks beyond 10 sigma are skipped.
void gaussian_blocks_serial(std::span<const MomentBlock> blocks, double sigma,
                            std::span<const double> zeta, std::span<double> out);
void gaussian_blocks_parallel(std::span<const MomentBlock> blocks, double sigma,
                              std::span<const double> zeta, std::span<double> out);

}  // namespace minlen::kernels
