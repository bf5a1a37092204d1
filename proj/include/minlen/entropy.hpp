#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "minlen/density.hpp"

namespace minlen {

enum class EntropyKind { Shannon, Renyi, Tsallis };

struct EntropyValue {
  double value = 0.0;  // nats
  EntropyKind kind = EntropyKind::Shannon;
  double alpha = 1.0;
  bool differential = true;
  double est_error = 0.0;
};

/// -int p ln p.  The error estimate is the change under 2x panel refinement plus
/// a bound for unmodelled tail mass.
EntropyValue diff_shannon(const DensityFn& density);

/// (int p^alpha)^{1/alpha}; 1 for alpha = 1.  Throws DivergenceError when a
/// heavy tail makes the integral infinite.
double alpha_norm(const DensityFn& density, double alpha);
double alpha_norm(const DiscreteDist& dist, double alpha);

/// ln(int p^alpha) / (1 - alpha); alpha = 1 dispatches to diff_shannon.
EntropyValue diff_renyi(const DensityFn& density, double alpha);

/// Bin probabilities over explicit edges.  Mass outside [edges.front(),
/// edges.back()] is folded into the end bins and must not exceed 1e-6.
DiscreteDist bin_density(const DensityFn& density, std::vector<double> edges);

/// Bins of fixed width on the lattice origin + j*width covering the whole
/// line.  Cells near the bulk are explicit; the remote cells of either side are
/// summed in closed form from the density's tail (see DiscreteDist::FarTail).
DiscreteDist bin_density_lattice(std::shared_ptr<const DensityFn> density, double width,
                                 double origin = 0.0);

/// alpha/(1-alpha) ln ||p||_alpha; alpha = 1 gives -sum p ln p.
EntropyValue discrete_renyi(const DiscreteDist& dist, double alpha);
/// (sum p^alpha - 1)/(1 - alpha); alpha = 1 gives -sum p ln p.
EntropyValue discrete_tsallis(const DiscreteDist& dist, double alpha);

/// (y^{1-nu} - 1)/(1 - nu), ln y at nu = 1.
double alpha_log(double y, double nu);

/// Monte-Carlo estimate -(1/N) sum ln p(t_i) with t_i drawn from the density by
/// inverse-CDF sampling; est_error is the standard error.
EntropyValue mc_diff_shannon(const DensityFn& density, std::int64_t n_samples,
                             std::uint64_t seed);

}  // namespace minlen
