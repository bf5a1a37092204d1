#include "minlen/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "minlen/core.hpp"
#include "minlen/error.hpp"
#include "minlen/numerics.hpp"

namespace minlen {

namespace {

constexpr double kFoldLimit = 1e-6;
// Far lattice cells begin this many widths out, where the cell expansions in
// DiscreteDist::FarTail are accurate to ~1e-9 relative.
constexpr double kFarCells = 20000.0;

double unmodelled_entropy_bound(double m) {
  return m > 0.0 ? m * (1.0 + std::abs(std::log(m))) : 0.0;
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InvalidParameter("alpha must be > 0");
}

}  // namespace

EntropyValue diff_shannon(const DensityFn& density) {
  density.require_normalized();
  const Grid& g = density.grid();
  const double on_grid = density.shannon_integral(g.lower(), g.upper());
  const double err = std::abs(on_grid - density.refined_shannon_integral()) +
                     unmodelled_entropy_bound(density.tail_mass_bound());
  return {density.shannon_integral(), EntropyKind::Shannon, 1.0, true, err};
}

double alpha_norm(const DensityFn& density, double alpha) {
  check_alpha(alpha);
  if (alpha == 1.0) return 1.0;
  return std::pow(density.power_integral(alpha), 1.0 / alpha);
}

double alpha_norm(const DiscreteDist& dist, double alpha) {
  check_alpha(alpha);
  if (alpha == 1.0) return 1.0;
  return std::pow(dist.power_sum(alpha), 1.0 / alpha);
}

EntropyValue diff_renyi(const DensityFn& density, double alpha) {
  check_alpha(alpha);
  if (alpha == 1.0) return diff_shannon(density);
  density.require_normalized();
  const Grid& g = density.grid();
  const double full = density.power_integral(alpha);
  const double on_grid = density.power_integral(alpha, g.lower(), g.upper());
  const double delta = std::abs(on_grid - density.refined_power_integral(alpha));
  // unmodelled mass m can add at most m^alpha (alpha < 1) or m (alpha > 1)
  const double m = density.tail_mass_bound();
  const double missing = m > 0.0 ? std::pow(m, std::min(alpha, 1.0)) : 0.0;
  const double err = (delta + missing) / (full * std::abs(1.0 - alpha));
  return {std::log(full) / (1.0 - alpha), EntropyKind::Renyi, alpha, true, err};
}

namespace {

// Interpolation ripple where the density is ~1e-40 can leave a cell slightly
// negative; anything beyond that is a real defect and is kept for the check.
double cell_mass(const DensityFn& d, double a, double b) {
  const double m = d.integral(a, b);
  return m < 0.0 && m > -1e-14 ? 0.0 : m;
}

}  // namespace

DiscreteDist bin_density(const DensityFn& density, std::vector<double> edges) {
  if (edges.size() < 2) throw InvalidParameter("binning needs at least two edges");
  for (std::size_t i = 1; i < edges.size(); ++i)
    if (!(edges[i] > edges[i - 1])) throw InvalidParameter("bin edges must increase");
  std::vector<double> p(edges.size() - 1);
  for (std::size_t j = 0; j < p.size(); ++j) p[j] = cell_mass(density, edges[j], edges[j + 1]);
  const double below = density.integral(-kInf, edges.front());
  const double above = density.integral(edges.back(), kInf);
  if (below + above + density.tail_mass_bound() > kFoldLimit)
    throw InvalidParameter("bin edges leave more than 1e-6 of the mass outside");
  p.front() += below;
  p.back() += above;
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  return DiscreteDist(std::move(edges), std::move(p), {}, 1.0 / total);
}

DiscreteDist bin_density_lattice(std::shared_ptr<const DensityFn> density, double width,
                                 double origin) {
  if (!(width > 0.0) || !std::isfinite(width)) throw InvalidParameter("bin width must be > 0");
  const DensityFn& d = *density;
  // Extent of the explicit cells on each side: far enough out for the far-cell
  // expansions, and past the grid when the tail oscillates (the lattice sums
  // need the tail model there); never beyond where the density lives.
  auto reach = [&](int side) {
    const auto& tail = side > 0 ? d.right_tail() : d.left_tail();
    const double end = side > 0 ? d.grid().upper() : -d.grid().lower();
    double r = kFarCells * width;
    if (tail && tail->period > 0.0) r = std::max(r, tail->start);
    if (!tail) r = std::min(r, end);
    return r;
  };
  const double hi = reach(1), lo = -reach(-1);
  const double j_lo = std::floor((lo - origin) / width);
  const double j_hi = std::ceil((hi - origin) / width);
  if (j_hi - j_lo > 5e7) throw ResolutionError("too many explicit bins");
  const auto n = static_cast<std::size_t>(j_hi - j_lo);
  std::vector<double> edges(n + 1), p(n);
  for (std::size_t i = 0; i <= n; ++i) edges[i] = origin + (j_lo + static_cast<double>(i)) * width;
  for (std::size_t j = 0; j < n; ++j) p[j] = cell_mass(d, edges[j], edges[j + 1]);
  double total = std::accumulate(p.begin(), p.end(), 0.0);
  std::vector<DiscreteDist::FarTail> far;
  const bool has_right = d.right_tail() || edges.back() < d.grid().upper();
  const bool has_left = d.left_tail() || edges.front() > d.grid().lower();
  if (has_right) far.push_back({density, 1, edges.back(), width});
  if (has_left) far.push_back({density, -1, edges.front(), width});
  for (const auto& f : far) total += f.mass();
  return DiscreteDist(std::move(edges), std::move(p), std::move(far), 1.0 / total);
}

EntropyValue discrete_renyi(const DiscreteDist& dist, double alpha) {
  check_alpha(alpha);
  if (alpha == 1.0) return {dist.shannon_sum(), EntropyKind::Shannon, 1.0, false, 0.0};
  const double v = std::log(dist.power_sum(alpha)) / (1.0 - alpha);
  return {std::max(v, 0.0), EntropyKind::Renyi, alpha, false, 0.0};
}

EntropyValue discrete_tsallis(const DiscreteDist& dist, double alpha) {
  check_alpha(alpha);
  if (alpha == 1.0) return {dist.shannon_sum(), EntropyKind::Shannon, 1.0, false, 0.0};
  const double v = (dist.power_sum(alpha) - 1.0) / (1.0 - alpha);
  return {std::max(v, 0.0), EntropyKind::Tsallis, alpha, false, 0.0};
}

double alpha_log(double y, double nu) {
  if (!(y > 0.0)) throw DomainError("alpha_log needs y > 0");
  if (!(nu > 0.0)) throw InvalidParameter("alpha_log needs nu > 0");
  const double e = 1.0 - nu;
  // expm1 keeps the nu -> 1 limit smooth
  return nu == 1.0 ? std::log(y) : std::expm1(e * std::log(y)) / e;
}

namespace {

/// Inverse-CDF sampler over the grid panels and power tails of a density.
class Sampler {
 public:
  explicit Sampler(const DensityFn& d) : d_(d) {
    const Grid& g = d.grid();
    cum_.push_back(0.0);
    if (d.left_tail()) cum_.push_back(cum_.back() + d.left_tail()->mass(d.left_tail()->start));
    for (std::size_t p = 0; p < g.panel_count(); ++p) {
      const auto c = d.native_coefficients(p);
      const double half = 0.5 * (g.breaks()[p + 1] - g.breaks()[p]);
      cum_.push_back(cum_.back() + half * (num::legendre_series_integral(c, 1.0) -
                                           num::legendre_series_integral(c, -1.0)));
    }
    if (d.right_tail()) cum_.push_back(cum_.back() + d.right_tail()->mass(d.right_tail()->start));
  }

  double draw(NormalStream& rng) const {
    const double u = rng.uniform() * cum_.back();
    const std::size_t k = std::min(
        static_cast<std::size_t>(std::upper_bound(cum_.begin() + 1, cum_.end(), u) - cum_.begin() - 1),
        cum_.size() - 2);
    const bool left = d_.left_tail() && k == 0;
    const std::size_t panels = d_.grid().panel_count();
    const std::size_t first = d_.left_tail() ? 1 : 0;
    if (left) return -tail_draw(*d_.left_tail(), rng);
    if (k >= first + panels) return tail_draw(*d_.right_tail(), rng);
    return panel_draw(k - first, u - cum_[k]);
  }

 private:
  // Pareto proposal with the profile's upper bound as envelope.
  static double tail_draw(const PowerTail& t, NormalStream& rng) {
    double bound = t.cos_coeffs[0];
    for (std::size_t h = 1; h < t.cos_coeffs.size(); ++h)
      bound += std::hypot(t.cos_coeffs[h], h < t.sin_coeffs.size() ? t.sin_coeffs[h] : 0.0);
    for (;;) {
      const double v = 1.0 - rng.uniform();
      const double x = t.start * std::pow(v, -1.0 / (t.power - 1.0));
      if (rng.uniform() * bound <= t.profile(t.side * x)) return x;
    }
  }

  double panel_draw(std::size_t p, double target) const {
    const Grid& g = d_.grid();
    const auto br = g.breaks();
    const double lo = br[p], hi = br[p + 1], half = 0.5 * (hi - lo);
    const auto c = d_.native_coefficients(p);
    const double base = num::legendre_series_integral(c, -1.0);
    auto F = [&](double t) { return half * (num::legendre_series_integral(c, t) - base) - target; };
    double a = -1.0, b = 1.0, t = 0.0;
    for (int it = 0; it < 200; ++it) {
      const double f = F(t);
      if (f > 0) b = t; else a = t;
      const double dens = half * num::legendre_series<double>(c, t);
      double next = dens > 0.0 ? t - f / dens : 0.5 * (a + b);
      if (!(next > a && next < b)) next = 0.5 * (a + b);
      if (std::abs(next - t) < 1e-15 || b - a < 1e-15) {
        t = next;
        break;
      }
      t = next;
    }
    return g.map().to_physical(lo + half * (t + 1.0));
  }

  const DensityFn& d_;
  std::vector<double> cum_;
};

}  // namespace

EntropyValue mc_diff_shannon(const DensityFn& density, std::int64_t n_samples,
                             std::uint64_t seed) {
  if (n_samples < 2) throw InvalidParameter("need at least two samples");
  density.require_normalized();
  Sampler sampler(density);
  NormalStream rng(seed);
  double mean = 0.0, m2 = 0.0;
  for (std::int64_t i = 0; i < n_samples; ++i) {
    const double t = sampler.draw(rng);
    const double p = density(t);
    if (!(p > 0.0)) throw ResolutionError("sampled a point of zero density");
    const double x = -std::log(p);
    const double delta = x - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (x - mean);
  }
  const double var = m2 / static_cast<double>(n_samples - 1);
  return {mean, EntropyKind::Shannon, 1.0, true, std::sqrt(var / static_cast<double>(n_samples))};
}

}  // namespace minlen
