#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "minlen/density.hpp"
#include "minlen/grid.hpp"

namespace minlen {

using cplx = std::complex<double>;

/// Deformation parameter beta and the half-width q0 of the auxiliary interval.
/// beta == 0 stores q0 = +infinity and selects the undeformed formulas.
struct MinLengthParams {
  double beta = 0.0;
  double q0 = kInf;
  bool deformed() const { return beta > 0.0; }
};

MinLengthParams make_params(double beta);

/// Conjugate orders 1/alpha + 1/gamma = 2 with alpha > 1 > gamma > 1/2, or the
/// degenerate pair alpha = gamma = 1.
struct OrderPair {
  double alpha = 1.0;
  double gamma = 1.0;
  bool degenerate() const { return alpha == 1.0 && gamma == 1.0; }
  double nu() const { return alpha > gamma ? alpha : gamma; }
};

/// Validates the pair (throws InvalidParameter when not conjugate).
OrderPair make_order_pair(double alpha, double gamma);

/// phi(q) tabulated on a Q grid.  Between nodes the amplitude is the panel
/// interpolant in the grid's native coordinate; it vanishes outside the grid.
class PureState {
 public:
  PureState() = default;
  PureState(MinLengthParams params, Grid grid, std::vector<cplx> amplitudes,
            std::string label = "");

  const MinLengthParams& params() const { return params_; }
  const Grid& grid() const { return grid_; }
  std::span<const cplx> amplitudes() const { return amp_; }
  const std::string& label() const { return label_; }

  /// Half-width of the q support actually covered (q0, or the cutoff for beta = 0).
  double support() const;
  cplx amplitude(double q) const;
  cplx amplitude_native(double s) const;
  /// d phi / dq at a native coordinate.
  cplx derivative_native(double s) const;
  double norm2() const;

  /// Same state sampled on another Q grid with the same map.
  PureState resampled(const Grid& grid) const;
  PureState scaled(cplx factor) const;

 private:
  MinLengthParams params_;
  Grid grid_;
  std::vector<cplx> amp_;
  std::vector<cplx> coeffs_;
  std::string label_;
};

/// Finite convex mixture of pure states that share beta.
class MixedState {
 public:
  struct Component {
    double weight;
    PureState state;
  };

  MixedState() = default;
  explicit MixedState(std::vector<Component> components);
  static MixedState pure(PureState s) { return MixedState({{1.0, std::move(s)}}); }

  const std::vector<Component>& components() const { return components_; }
  const MinLengthParams& params() const { return components_.front().state.params(); }
  std::string label() const;

 private:
  std::vector<Component> components_;
};

PureState normalize(const PureState& state);

enum class CatalogName { UniformQ, RaisedCosineQ, TruncatedGaussianQ, RandomFourierQ };

std::string_view to_string(CatalogName name);
CatalogName parse_catalog_name(std::string_view name);
std::vector<CatalogName> all_catalog_names();

/// Reference states.  Shape arguments: truncated_gaussian_q takes the width s
/// (default q0/8, or 1 when beta = 0); random_fourier_q takes the mode count m
/// (default 6) and requires a seed.  Only truncated_gaussian_q exists at beta = 0.
PureState catalog_state(CatalogName name, const MinLengthParams& params,
                        const std::vector<double>& shape_args = {},
                        std::optional<std::uint64_t> seed = std::nullopt);

/// Builds an adaptively refined Q grid for an amplitude given as a function of
/// (q, q0 - |q|) and samples it.  Panels are split until their trailing
/// Legendre coefficients fall below tol relative to max |phi|.  The state is not
/// normalized.
PureState tabulate_state(const MinLengthParams& params,
                         const std::function<cplx(double q, double gap)>& phi,
                         std::string label, double cutoff = 0.0, double tol = 1e-14);

struct MomentValue {
  double value;
  double est_error;
};

/// int t^n rho(t) dt.  Throws MomentDivergence when the tail makes it diverge.
MomentValue moment(const DensityFn& density, int n);

/// Deterministic variates on every platform: std::mt19937_64 output is fixed
/// by the standard, while the library distributions are not, so uniforms are
/// taken from the top 53 bits and normals by Box-Muller.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : rng_(seed) {}
  double uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
  double next();

 private:
  std::mt19937_64 rng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace minlen
