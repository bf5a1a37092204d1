// Serial reference vs OpenMP version of each kernel on the same inputs.
#include <benchmark/benchmark.h>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "minlen/kernels.hpp"

using namespace minlen::kernels;

namespace {

struct FourierCase {
  std::vector<std::complex<double>> coeffs;
  std::vector<double> x;
  std::vector<std::complex<double>> out;
  PanelSeries series;

  explicit FourierCase(int panels) {
    const int order = 12;
    std::mt19937_64 rng(5);
    std::normal_distribution<double> n;
    coeffs.resize(static_cast<std::size_t>(panels) * order);
    for (auto& c : coeffs) c = {n(rng), n(rng)};
    x.resize(4096);
    for (std::size_t j = 0; j < x.size(); ++j) x[j] = -200.0 + 400.0 * j / (x.size() - 1.0);
    out.resize(x.size());
    series = {-1.0, 2.0 / panels, panels, order, coeffs};
  }
};

struct BlockCase {
  std::vector<MomentBlock> blocks;
  std::vector<double> zeta, out;
  double sigma = 1.0;

  explicit BlockCase(int count) {
    const double w = sigma / 8.0;
    for (int i = 0; i < count; ++i) {
      MomentBlock b{};
      b.center = -0.5 * count * w + (i + 0.5) * w;
      b.lo = b.center - 0.5 * w;
      b.hi = b.center + 0.5 * w;
      const double rho = std::exp(-0.5 * b.center * b.center / 100.0);
      for (int k = 0; k < kBlockMoments; k += 2) b.m[k] = rho * std::pow(0.5 * w, k + 1) * 2.0 / (k + 1);
      blocks.push_back(b);
    }
    zeta.resize(8192);
    for (std::size_t j = 0; j < zeta.size(); ++j)
      zeta[j] = blocks.front().lo + (blocks.back().hi - blocks.front().lo) * j / (zeta.size() - 1.0);
    out.resize(zeta.size());
  }
};

void BM_FourierSerial(benchmark::State& state) {
  FourierCase c(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    fourier_serial(c.series, 1.0, c.x, c.out);
    benchmark::DoNotOptimize(c.out.data());
  }
}

void BM_FourierParallel(benchmark::State& state) {
  FourierCase c(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    fourier_parallel(c.series, 1.0, c.x, c.out);
    benchmark::DoNotOptimize(c.out.data());
  }
}

void BM_GaussianBlocksSerial(benchmark::State& state) {
  BlockCase c(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    std::fill(c.out.begin(), c.out.end(), 0.0);
    gaussian_blocks_serial(c.blocks, c.sigma, c.zeta, c.out);
    benchmark::DoNotOptimize(c.out.data());
  }
}

void BM_GaussianBlocksParallel(benchmark::State& state) {
  BlockCase c(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    std::fill(c.out.begin(), c.out.end(), 0.0);
    gaussian_blocks_parallel(c.blocks, c.sigma, c.zeta, c.out);
    benchmark::DoNotOptimize(c.out.data());
  }
}

}  // namespace

BENCHMARK(BM_FourierSerial)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FourierParallel)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GaussianBlocksSerial)->Arg(1024)->Arg(8192)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GaussianBlocksParallel)->Arg(1024)->Arg(8192)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
