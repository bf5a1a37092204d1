#pragma once

#include <span>
#include <vector>

#include "minlen/core.hpp"
#include "minlen/density.hpp"
#include "minlen/grid.hpp"

namespace minlen {

/// k = tan(sqrt(beta) q) / sqrt(beta); k = q when beta = 0.  Requires |q| < q0.
double k_of_q(double q, const MinLengthParams& params);
/// Inverse of k_of_q.
double q_of_k(double k, const MinLengthParams& params);

/// psi(x) = (2 pi)^{-1/2} int e^{iqx} phi(q) dq at the nodes of x_grid.
std::vector<cplx> fourier_q_to_x(const PureState& state, const Grid& x_grid);

/// Inverse transform of psi sampled on a uniform-panel X grid.  Beyond the
/// grid psi is continued by its e^{+-i q0 x}(a/x + b/x^2) asymptotics fitted to
/// the outer nodes.  With beta = 0 there is no q0; q_cutoff bounds the result.
PureState fourier_x_to_q(const Grid& x_grid, std::span<const cplx> psi,
                         const MinLengthParams& params, double q_cutoff = 0.0);

/// v(q) = sum_i lambda_i |phi_i(q)|^2 on the union of the component grids.
DensityFn q_density(const MixedState& state);

/// u(k) = v(q(k)) / (1 + beta k^2) on the image grid (same native panels), with a
/// power-law model past the last node.
DensityFn density_q_to_k(const DensityFn& v, const MinLengthParams& params);

struct PositionDensity {
  DensityFn density;
  /// Grid mass of |psi|^2 plus the fitted tail mass before calibration.
  double parseval_mass;
};

/// w(x) = sum_i lambda_i |psi_i(x)|^2.  The grid grows until the missing mass is
/// below 1e-13; otherwise oscillating power tails are fitted and scaled to
/// carry the missing mass.
PositionDensity position_density(const MixedState& state);

struct RepresentationBundle {
  DensityFn v_q;
  DensityFn w_x;
  DensityFn u_k;
  MixedState source;
  double parseval_mass = 1.0;
};

RepresentationBundle bundle(const MixedState& state);

}  // namespace minlen
