#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "minlen/grid.hpp"

namespace minlen {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Asymptotic model of a density beyond the end of its grid:
///   rho(t) ~ P(t) / |t|^power  for side * t >= start,
/// where P is a nonnegative trigonometric polynomial of the given period
/// (constant when period == 0).  Tail integrals expand the periodic factor in
/// harmonics and sum the boundary terms of each one.
struct PowerTail {
  int side = 1;  // +1 right tail, -1 left tail
  double start = 0.0;
  double power = 2.0;
  double period = 0.0;
  std::vector<double> cos_coeffs{0.0};  // a_0, a_1, ...
  std::vector<double> sin_coeffs{0.0};  // b_0 (unused), b_1, ...

  double profile(double t) const;
  double value(double t) const;
  bool contains(double t) const { return side * t >= start; }

  /// Integrals over side*t in [from, infinity), from >= start.
  double mass(double from) const;
  double power_integral(double g, double from) const;
  double shannon(double from) const;
  /// int t^n rho(t) dt over the tail; throws MomentDivergence when n + 1 >= power.
  double moment(int n, double from) const;

  /// Integral of rho over [lo, hi] (absolute coordinates, inside the tail).
  double integral(double lo, double hi) const;

  /// The tail scaled by a constant factor.
  PowerTail scaled(double factor) const;
};

/// Fits a PowerTail to `f` just inside `edge` (side * edge > 0).  Oscillatory
/// fits sample the last period before the edge and compare its mean with the
/// period ending at edge/2; non-oscillatory fits compare f(edge) with
/// f(edge * ratio_point).  Returns nullopt when f is negligible at the edge.
std::optional<PowerTail> fit_power_tail(const std::function<double(double)>& f, double edge,
                                        int side, double period, double ratio_point = 0.5);

/// A tabulated probability density: values at the nodes of a composite
/// Gauss-Legendre grid, a piecewise-polynomial interpolant in the grid's
/// native coordinate, and optional asymptotic tails past either end.
class DensityFn {
 public:
  DensityFn() = default;
  DensityFn(Grid grid, std::vector<double> values, double tail_mass_bound = 0.0,
            std::optional<PowerTail> left = std::nullopt,
            std::optional<PowerTail> right = std::nullopt);

  const Grid& grid() const { return grid_; }
  Domain domain() const { return grid_.domain(); }
  std::span<const double> values() const { return values_; }
  /// Mass neither on the grid nor in a tail model (estimated).
  double tail_mass_bound() const { return tail_mass_bound_; }
  const std::optional<PowerTail>& left_tail() const { return left_; }
  const std::optional<PowerTail>& right_tail() const { return right_; }

  /// Density at any t: interpolant on the grid, tail model outside, else 0.
  double operator()(double t) const;
  /// Native-coordinate density (rho * dt/ds) interpolated at native s.
  double native_value(double s) const;
  std::span<const double> native_coefficients(std::size_t panel) const;

  double grid_mass() const;
  /// Grid plus tail-model mass.
  double mass() const;
  /// int_a^b rho(t) dt (a and b may be infinite).
  double integral(double a, double b) const;

  /// int rho^g over [a, b]; tails in closed form.  Throws DivergenceError when a
  /// tail makes the integral diverge.
  double power_integral(double g, double a = -kInf, double b = kInf) const;
  /// -int rho ln rho over [a, b].
  double shannon_integral(double a = -kInf, double b = kInf) const;
  /// int t^n rho(t) dt; throws MomentDivergence for a divergent tail.
  double moment_integral(int n) const;

  /// Same functionals evaluated with every panel split in two and the
  /// interpolant sampled at the finer nodes (tails excluded).
  double refined_power_integral(double g) const;
  double refined_shannon_integral() const;
  /// Grid-only moment and its refined counterpart.
  double grid_moment(int n) const;
  double refined_grid_moment(int n) const;

  /// Throws ContractError unless mass + tail_mass_bound is within tol of 1.
  void require_normalized(double tol = 1e-8) const;

  /// Same density multiplied by a constant.
  DensityFn scaled(double factor) const;

 private:
  double grid_integral(double a, double b) const;
  double grid_functional(const std::function<double(double)>& f, double a, double b) const;
  double panel_partial_functional(const std::function<double(double)>& f, double s_lo,
                                  double s_hi) const;
  double tail_functional(double a, double b, const std::function<double(const PowerTail&, double)>& full) const;

  Grid grid_;
  std::vector<double> values_;
  double tail_mass_bound_ = 0.0;
  std::optional<PowerTail> left_, right_;
  std::vector<double> coeffs_;       // Legendre coefficients of the native density
  std::vector<double> panel_mass_;
};

/// Discrete distribution from binning a density.  Bins given by `edges` are
/// explicit; optional far tails continue a lattice of fixed width to infinity
/// and contribute to the sums through integrals of their source density.
class DiscreteDist {
 public:
  struct FarTail {
    std::shared_ptr<const DensityFn> density;
    int side = 1;
    double start = 0.0;  // first lattice edge (absolute coordinate)
    double width = 0.0;
    double mass() const;
    double power_sum(double alpha) const;
    double shannon_sum() const;
  };

  DiscreteDist(std::vector<double> edges, std::vector<double> probs,
               std::vector<FarTail> far = {}, double scale = 1.0);

  std::span<const double> edges() const { return edges_; }
  std::span<const double> probs() const { return probs_; }
  const std::vector<FarTail>& far_tails() const { return far_; }
  double delta_max() const { return delta_max_; }
  std::size_t size() const { return probs_.size(); }

  double total() const;
  /// sum_j p_j^alpha over explicit and far bins.
  double power_sum(double alpha) const;
  /// -sum_j p_j ln p_j.
  double shannon_sum() const;

 private:
  std::vector<double> edges_, probs_;
  std::vector<FarTail> far_;
  double scale_ = 1.0;
  double delta_max_ = 0.0;
};

}  // namespace minlen
