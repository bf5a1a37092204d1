#include "minlen/measurement.hpp"

#include <algorithm>
#include <cmath>

#include "minlen/error.hpp"
#include "minlen/kernels.hpp"
#include "minlen/numerics.hpp"

namespace minlen {

namespace {

constexpr int kOrder = 12;
constexpr double kReach = 10.0;          // Gaussian window, in sigma
constexpr double kBlockWidth = 0.125;    // fine blocks, in sigma
constexpr double kPieceWidth = 0.5;      // quadrature pieces over coarse panels, in sigma
constexpr int kHermiteNodes = 24;
constexpr double kCachedPieces = 256.0;  // pieces per panel sampled up front
constexpr double kOutReach = 64.0;       // smeared X grids extend at least this many sigma
constexpr double kRefineTol = 1e-12;
constexpr std::size_t kMaxOutPanels = 40000;
constexpr double kMassLoss = 1e-6;
constexpr double kCalibration = 0.05;
constexpr double kNegligibleMass = 1e-9;

/// Convolution of a density with an acceptance profile, evaluated pointwise.
class Smearer {
 public:
  Smearer(const DensityFn& d, const AcceptanceFn& f, double extent) : d_(d), f_(f) {
    gaussian_ = f.profile() == AcceptanceFn::Profile::Gaussian;
    const double block = gaussian_ ? kBlockWidth * f.sigma() : 0.0;
    piece_ = kPieceWidth * f.sigma();
    if (!gaussian_) {
      sample_profile();
      return;
    }

    std::vector<std::pair<double, double>> nodes;  // (t, mass) of the open block
    double block_lo = 0.0;
    auto close = [&]() {
      if (nodes.empty()) return;
      kernels::MomentBlock b{};
      b.lo = block_lo;
      b.hi = nodes.back().first;
      b.center = 0.5 * (b.lo + b.hi);
      for (const auto& [t, m] : nodes) {
        double p = m;
        for (int k = 0; k < kernels::kBlockMoments; ++k, p *= t - b.center) b.m[k] += p;
      }
      blocks_.push_back(b);
      nodes.clear();
    };
    auto panel = [&](double a, double b, const std::vector<std::pair<double, double>>& pts) {
      if (b - a <= block) {
        if (!nodes.empty() && b - block_lo > block) close();
        if (nodes.empty()) block_lo = a;
        nodes.insert(nodes.end(), pts.begin(), pts.end());
      } else {
        close();
        coarse_.emplace_back(a, b);
      }
    };

    const Grid& g = d.grid();
    const auto br = g.breaks();
    const num::GaussRule& rule = num::gauss_legendre(kOrder);
    std::vector<std::pair<double, double>> pts;
    // Oscillating tails are cut into pseudo-panels out to `extent`.
    auto tail_panels = [&](const PowerTail& t, int side) {
      const double h = t.period > 0.0 ? 0.5 * t.period : std::max(block, piece_);
      const double end = std::max(extent, t.start);
      const auto n = static_cast<std::size_t>(std::ceil((end - t.start) / h));
      std::vector<std::pair<double, double>> spans;
      for (std::size_t i = 0; i < n; ++i) {
        const double u0 = t.start + static_cast<double>(i) * h, u1 = u0 + h;
        spans.emplace_back(side > 0 ? u0 : -u1, side > 0 ? u1 : -u0);
      }
      if (side < 0) std::reverse(spans.begin(), spans.end());
      for (const auto& [a, b] : spans) {
        pts.clear();
        for (int i = 0; i < rule.size(); ++i) {
          const double t_i = 0.5 * (a + b) + 0.5 * (b - a) * rule.x[i];
          pts.emplace_back(t_i, t.value(t_i) * 0.5 * (b - a) * rule.w[i]);
        }
        panel(a, b, pts);
      }
    };
    if (d.left_tail() && d.left_tail()->period > 0.0) tail_panels(*d.left_tail(), -1);
    for (std::size_t p = 0; p < g.panel_count(); ++p) {
      const double a = g.map().to_physical(br[p]), b = g.map().to_physical(br[p + 1]);
      pts.clear();
      const std::size_t off = g.panel_offset(p);
      for (int i = 0; i < g.order(); ++i)
        pts.emplace_back(g.nodes()[off + i], d.values()[off + i] * g.weights()[off + i]);
      panel(a, b, pts);
    }
    if (d.right_tail() && d.right_tail()->period > 0.0) tail_panels(*d.right_tail(), 1);
    close();
    sample_coarse();
  }

  void evaluate(std::span<const double> zeta, std::span<double> out) const {
    std::fill(out.begin(), out.end(), 0.0);
    if (!gaussian_) {
      const auto n = static_cast<std::ptrdiff_t>(zeta.size());
#pragma omp parallel for schedule(dynamic, 16)
      for (std::ptrdiff_t j = 0; j < n; ++j) {
        double sum = 0.0;
        for (std::size_t i = 0; i < profile_y_.size(); ++i) sum += profile_c_[i] * d_(zeta[j] - profile_y_[i]);
        out[j] = sum;
      }
      return;
    }
    if (!blocks_.empty()) kernels::gaussian_blocks_parallel(blocks_, f_.sigma(), zeta, out);
    const auto n = static_cast<std::ptrdiff_t>(zeta.size());
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t j = 0; j < n; ++j) out[j] += coarse_part(zeta[j]);
  }

 private:
  // A tabulated profile is integrated over its own panels, in pieces narrow
  // enough for both the profile and the input density: U(z) = sum c_i rho(z - y_i).
  void sample_profile() {
    const DensityFn& table = *f_.table();
    const Grid& g = d_.grid();
    double h = piece_;
    for (std::size_t p = 0; p < g.panel_count(); ++p) {
      const double a = g.map().to_physical(g.breaks()[p]), b = g.map().to_physical(g.breaks()[p + 1]);
      if (std::max(std::abs(a), std::abs(b)) <= kReach * f_.sigma() + f_.upper() - f_.lower())
        h = std::min(h, b - a);
    }
    const auto br = table.grid().breaks();
    const num::GaussRule& r = num::gauss_legendre(10);
    for (std::size_t p = 0; p + 1 < br.size(); ++p) {
      const int n = std::max(1, static_cast<int>(std::ceil((br[p + 1] - br[p]) / h)));
      const double w = (br[p + 1] - br[p]) / n;
      for (int k = 0; k < n; ++k) {
        const double m = br[p] + (k + 0.5) * w;
        for (int i = 0; i < r.size(); ++i) {
          const double y = m + 0.5 * w * r.x[i];
          profile_y_.push_back(y);
          profile_c_.push_back(0.5 * w * r.w[i] * f_(y));
        }
      }
    }
  }

  double coarse_part(double z) const {
    const double lo = z - f_.upper(), hi = z - f_.lower();
    const auto first = std::lower_bound(piece_t_.begin(), piece_t_.end(), lo);
    const auto last = std::upper_bound(first, piece_t_.end(), hi);
    // Inside a single wide panel the density is smooth on the profile's scale,
    // so a Gauss-Hermite rule replaces the piecewise sum.
    if (gaussian_) {
      auto w = std::lower_bound(wide_.begin(), wide_.end(), lo,
                                [](const auto& c, double v) { return c.second < v; });
      if (w != wide_.end() && w->first <= lo && hi <= w->second) {
        const num::GaussRule& r = num::gauss_hermite(kHermiteNodes);
        const double s = std::sqrt(2.0) * f_.sigma();
        double sum = 0.0;
        for (int i = 0; i < r.size(); ++i) sum += r.w[i] * d_(z - s * r.x[i]);
        return sum / std::sqrt(num::kPi);
      }
    }
    double sum = 0.0;
    for (auto i = static_cast<std::size_t>(first - piece_t_.begin()),
              e = static_cast<std::size_t>(last - piece_t_.begin());
         i < e; ++i)
      sum += piece_m_[i] * f_(z - piece_t_[i]);
    // wide panels are integrated over the window only
    auto it = std::lower_bound(wide_.begin(), wide_.end(), lo,
                               [](const auto& c, double v) { return c.second < v; });
    for (; it != wide_.end() && it->first < hi; ++it) {
      const double a = std::max(lo, it->first), b = std::min(hi, it->second);
      if (b > a) for_pieces(a, b, [&](double t, double w) { sum += w * f_(z - t) * d_(t); });
    }
    return sum;
  }

  // Splits [a, b] into pieces no wider than piece_, with a 10-point rule on each.
  template <class Fn>
  void for_pieces(double a, double b, Fn&& fn) const {
    const num::GaussRule& r = num::gauss_legendre(10);
    const int n = std::max(1, static_cast<int>(std::ceil((b - a) / piece_)));
    const double h = (b - a) / n;
    for (int k = 0; k < n; ++k) {
      const double m = a + (k + 0.5) * h;
      for (int i = 0; i < r.size(); ++i) fn(m + 0.5 * h * r.x[i], 0.5 * h * r.w[i]);
    }
  }

  // Coarse panels of moderate width are sampled once; wider ones stay in wide_.
  void sample_coarse() {
    std::vector<std::pair<double, double>> wide;
    for (const auto& [a, b] : coarse_) {
      if (b - a > kCachedPieces * piece_) {
        wide.emplace_back(a, b);
        continue;
      }
      for_pieces(a, b, [&](double t, double w) {
        piece_t_.push_back(t);
        piece_m_.push_back(w * d_(t));
      });
    }
    wide_ = std::move(wide);
  }

  const DensityFn& d_;
  const AcceptanceFn& f_;
  double piece_;
  bool gaussian_ = true;
  std::vector<kernels::MomentBlock> blocks_;
  std::vector<std::pair<double, double>> coarse_;  // sorted, disjoint
  std::vector<std::pair<double, double>> wide_;
  std::vector<double> piece_t_, piece_m_;          // sorted nodes and their masses
  std::vector<double> profile_y_, profile_c_;
};

Domain smeared_domain(Domain d) {
  if (d == Domain::K) return Domain::Zeta;
  if (d == Domain::X) return Domain::Xi;
  throw InvalidParameter("only K and X densities are smeared");
}

/// The periodic tail of the input convolved with the profile, harmonic by harmonic.
PowerTail smeared_tail(const PowerTail& t, const AcceptanceFn& f, double start) {
  PowerTail out = t;
  out.start = start;
  const double w0 = 2.0 * num::kPi / t.period;
  for (std::size_t h = 1; h < t.cos_coeffs.size(); ++h) {
    const double w = w0 * static_cast<double>(h);
    double c, s = 0.0;
    if (f.profile() == AcceptanceFn::Profile::Gaussian) {
      c = std::exp(-0.5 * w * w * f.sigma() * f.sigma());
    } else {
      c = num::integrate_adaptive([&](double z) { return f(z) * std::cos(w * z); }, f.lower(),
                                  f.upper(), 1e-14, 0.0);
      s = num::integrate_adaptive([&](double z) { return f(z) * std::sin(w * z); }, f.lower(),
                                  f.upper(), 1e-14, 0.0);
    }
    const double a = t.cos_coeffs[h], b = t.sin_coeffs[h];
    out.cos_coeffs[h] = a * c - b * s;
    out.sin_coeffs[h] = a * s + b * c;
  }
  return out;
}

DensityFn with_tails(const DensityFn& in, const AcceptanceFn& f, Grid grid,
                     std::vector<double> values) {
  const double in_mass = in.mass();
  DensityFn bare(grid, values);
  const double grid_mass = bare.grid_mass();
  if (grid.map().kind() == CoordinateMap::Kind::TanhK) {
    auto fn = [&bare](double t) { return bare(t); };
    auto right = fit_power_tail(fn, grid.upper(), 1, 0.0, 1.0 / 16);
    auto left = fit_power_tail(fn, grid.lower(), -1, 0.0, 1.0 / 16);
    DensityFn out(std::move(grid), std::move(values), 0.0, left, right);
    const double bound = std::max(0.0, in_mass - out.mass());
    if (bound > kMassLoss) throw ResolutionError("smearing lost mass beyond the output grid");
    return DensityFn(out.grid(), std::vector<double>(out.values().begin(), out.values().end()),
                     bound, left, right);
  }
  std::optional<PowerTail> left, right;
  const auto& rt = in.right_tail();
  const auto& lt = in.left_tail();
  if (rt && rt->period > 0.0 && grid.upper() >= rt->start) right = smeared_tail(*rt, f, grid.upper());
  if (lt && lt->period > 0.0 && -grid.lower() >= lt->start) left = smeared_tail(*lt, f, -grid.lower());
  const double missing = in_mass - grid_mass;
  const double raw = (right ? right->mass(right->start) : 0.0) + (left ? left->mass(left->start) : 0.0);
  if (raw > 0.0) {
    const double factor = missing / raw;
    // a tiny missing mass may be off by more than the relative tolerance
    if (std::abs(missing - raw) > std::max(kCalibration * raw, kNegligibleMass))
      throw ResolutionError("smeared tail model does not account for the missing mass");
    if (right) right = right->scaled(factor);
    if (left) left = left->scaled(factor);
    return DensityFn(std::move(grid), std::move(values), 0.0, left, right);
  }
  if (missing > kMassLoss) throw ResolutionError("smearing lost mass beyond the output grid");
  return DensityFn(std::move(grid), std::move(values), std::max(missing, 0.0));
}

std::vector<double> evaluate_on(const Smearer& s, const Grid& g) {
  std::vector<double> v(g.size());
  s.evaluate(g.nodes(), v);
  for (double& x : v) x = std::max(x, 0.0);
  return v;
}

}  // namespace

AcceptanceFn AcceptanceFn::gaussian(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InvalidParameter("sigma must be > 0");
  AcceptanceFn f;
  f.profile_ = Profile::Gaussian;
  f.sigma_ = sigma;
  f.lower_ = -kReach * sigma;
  f.upper_ = kReach * sigma;
  return f;
}

AcceptanceFn AcceptanceFn::custom(DensityFn profile) {
  if (profile.grid().map().kind() != CoordinateMap::Kind::Identity || profile.left_tail() ||
      profile.right_tail())
    throw InvalidParameter("custom acceptance needs a compact identity-mapped table");
  if (std::abs(profile.mass() - 1.0) > 1e-10)
    throw InvalidParameter("acceptance profile must integrate to 1");
  for (double v : profile.values())
    if (v < 0.0) throw InvalidParameter("acceptance profile must be nonnegative");
  AcceptanceFn f;
  f.profile_ = Profile::Custom;
  const double mean = profile.grid_moment(1);
  const double var = profile.grid_moment(2) - mean * mean;
  f.sigma_ = std::sqrt(std::max(var, 0.0));
  if (!(f.sigma_ > 0.0)) throw InvalidParameter("acceptance profile has zero width");
  f.lower_ = profile.grid().lower();
  f.upper_ = profile.grid().upper();
  f.symmetric_ = std::abs(f.lower_ + f.upper_) <= 1e-12 * f.upper_;
  for (std::size_t i = 0; f.symmetric_ && i < profile.values().size(); ++i) {
    const double z = profile.grid().nodes()[i];
    if (std::abs(profile(z) - profile(-z)) > 1e-12 * (1.0 + profile(z))) f.symmetric_ = false;
  }
  f.table_ = std::make_shared<const DensityFn>(std::move(profile));
  return f;
}

double AcceptanceFn::operator()(double z) const {
  if (profile_ == Profile::Gaussian) {
    const double y = z / sigma_;
    return std::exp(-0.5 * y * y) / (sigma_ * std::sqrt(2.0 * num::kPi));
  }
  return std::max(0.0, (*table_)(z));
}

AcceptanceFn gaussian_acceptance(double sigma) { return AcceptanceFn::gaussian(sigma); }

DensityFn smear(const DensityFn& density, const AcceptanceFn& f, const Grid& out_grid) {
  const Domain dom = smeared_domain(density.domain());
  if (out_grid.domain() != dom) throw InvalidParameter("output grid has the wrong domain tag");
  density.require_normalized();
  Smearer s(density, f, std::max(-out_grid.lower(), out_grid.upper()) + kReach * f.sigma());
  return with_tails(density, f, out_grid, evaluate_on(s, out_grid));
}

DensityFn smear(const DensityFn& density, const AcceptanceFn& f) {
  const Domain dom = smeared_domain(density.domain());
  density.require_normalized();
  const Grid& in = density.grid();
  const double sigma = f.sigma();
  std::vector<double> breaks;
  if (in.map().kind() == CoordinateMap::Kind::Identity) {
    double h_in = 0.0;
    for (std::size_t p = 0; p < in.panel_count(); ++p)
      h_in = std::max(h_in, in.breaks()[p + 1] - in.breaks()[p]);
    const double h = std::max(h_in, 0.5 * sigma);
    double lo = in.lower() - f.upper(), hi = in.upper() - f.lower();
    const bool tails = (density.right_tail() && density.right_tail()->period > 0.0) ||
                       (density.left_tail() && density.left_tail()->period > 0.0);
    if (tails) {
      const double L = std::max({-in.lower(), in.upper(), kOutReach * sigma}) + kReach * sigma;
      lo = -L;
      hi = L;
    }
    const auto n = static_cast<std::size_t>(std::ceil((hi - lo) / h));
    const double mid = 0.5 * (lo + hi), half = 0.5 * static_cast<double>(n) * h;
    for (std::size_t i = 0; i <= n; ++i) breaks.push_back(mid - half + static_cast<double>(i) * h);
  } else {
    breaks.assign(in.breaks().begin(), in.breaks().end());
  }
  const CoordinateMap map = in.map();
  const double extent = std::max(std::abs(map.to_physical(breaks.front())),
                                 std::abs(map.to_physical(breaks.back()))) +
                        kReach * sigma;
  Smearer s(density, f, map.kind() == CoordinateMap::Kind::Identity ? extent : 0.0);

  // Adaptive refinement: split panels whose native Legendre tails are large.
  const num::GaussRule& rule = num::gauss_legendre(kOrder);
  std::vector<std::vector<double>> panel_vals(breaks.size() - 1);
  auto fill = [&](std::size_t p) {
    std::vector<double> z(kOrder);
    const double a = breaks[p], b = breaks[p + 1];
    for (int i = 0; i < kOrder; ++i) z[i] = map.to_physical(0.5 * (a + b) + 0.5 * (b - a) * rule.x[i]);
    panel_vals[p].assign(kOrder, 0.0);
    return z;
  };
  for (int pass = 0;; ++pass) {
    // evaluate panels that have no values yet, in one batch
    std::vector<double> zs;
    std::vector<std::size_t> todo;
    for (std::size_t p = 0; p < panel_vals.size(); ++p) {
      if (!panel_vals[p].empty()) continue;
      auto z = fill(p);
      zs.insert(zs.end(), z.begin(), z.end());
      todo.push_back(p);
    }
    std::vector<double> vals(zs.size());
    s.evaluate(zs, vals);
    for (std::size_t k = 0; k < todo.size(); ++k)
      for (int i = 0; i < kOrder; ++i)
        panel_vals[todo[k]][i] = std::max(vals[k * kOrder + i], 0.0);

    double scale = 0.0;
    std::vector<double> tails(panel_vals.size());
    std::vector<double> native(kOrder), c(kOrder);
    for (std::size_t p = 0; p < panel_vals.size(); ++p) {
      const double a = breaks[p], b = breaks[p + 1];
      for (int i = 0; i < kOrder; ++i) {
        native[i] = panel_vals[p][i] * map.jacobian(0.5 * (a + b) + 0.5 * (b - a) * rule.x[i]);
        scale = std::max(scale, native[i]);
      }
      num::legendre_fit<double>(native, rule, c);
      tails[p] = std::abs(c[kOrder - 1]) + std::abs(c[kOrder - 2]) + std::abs(c[kOrder - 3]);
    }
    std::vector<double> next;
    std::vector<std::vector<double>> next_vals;
    bool split = false;
    for (std::size_t p = 0; p < panel_vals.size(); ++p) {
      next.push_back(breaks[p]);
      next_vals.push_back(std::move(panel_vals[p]));
      if (tails[p] > kRefineTol * scale && breaks[p + 1] - breaks[p] > 1e-9 * (1.0 + std::abs(breaks[p]))) {
        next_vals.back().clear();
        next.push_back(0.5 * (breaks[p] + breaks[p + 1]));
        next_vals.emplace_back();
        split = true;
      }
    }
    next.push_back(breaks.back());
    breaks = std::move(next);
    panel_vals = std::move(next_vals);
    if (!split) break;
    if (breaks.size() > kMaxOutPanels || pass > 30)
      throw ResolutionError("smeared density needs too many panels");
  }
  Grid out(dom, map, breaks, kOrder);
  std::vector<double> values;
  values.reserve(out.size());
  for (const auto& pv : panel_vals) values.insert(values.end(), pv.begin(), pv.end());
  return with_tails(density, f, std::move(out), std::move(values));
}

double j_value(const AcceptanceFn& f, const MinLengthParams& params, double zeta) {
  if (!params.deformed()) return 1.0;
  const double scale = 1.0 / std::sqrt(params.beta);
  const double a = zeta - f.upper(), b = zeta - f.lower();
  // break the range where the Lorentzian factor has structure
  std::vector<double> cuts{a};
  for (double c : {-8 * scale, -scale, 0.0, scale, 8 * scale})
    if (c > a && c < b) cuts.push_back(c);
  cuts.push_back(b);
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    sum += num::integrate_adaptive(
        [&](double k) { return f(zeta - k) / (1.0 + params.beta * k * k); }, cuts[i], cuts[i + 1],
        1e-13, 1e-12);
  }
  return sum;
}

std::vector<double> j_profile(const AcceptanceFn& f, const MinLengthParams& params,
                              const Grid& zeta_grid) {
  std::vector<double> out(zeta_grid.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = j_value(f, params, zeta_grid.nodes()[i]);
  return out;
}

SupValue s_f_sup(const AcceptanceFn& f, const MinLengthParams& params) {
  if (!params.deformed()) return {1.0, 0.0};
  const double L = 6.0 * f.sigma() + 4.0 / std::sqrt(params.beta) +
                   std::max(std::abs(f.lower()), std::abs(f.upper()));
  const int n = 200;
  double best = -1.0, arg = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double z = -L + 2.0 * L * i / n;
    const double j = j_value(f, params, z);
    if (j > best) {
      best = j;
      arg = z;
    }
  }
  // golden-section search in the bracketing cells
  const double step = 2.0 * L / n;
  double a = arg - step, b = arg + step;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a), d = a + g * (b - a);
  double jc = j_value(f, params, c), jd = j_value(f, params, d);
  while (b - a > 1e-8 * (1.0 + std::abs(arg))) {
    if (jc > jd) {
      b = d; d = c; jd = jc;
      c = b - g * (b - a);
      jc = j_value(f, params, c);
    } else {
      a = c; c = d; jc = jd;
      d = a + g * (b - a);
      jd = j_value(f, params, d);
    }
  }
  const double zm = 0.5 * (a + b);
  const double jm = j_value(f, params, zm);
  SupValue s = jm >= best ? SupValue{jm, zm} : SupValue{best, arg};
  if (f.symmetric()) {
    const double j0 = j_value(f, params, 0.0);
    // ties go to the symmetric point
    if (j0 >= s.value * (1.0 - 1e-14)) s = {std::max(j0, s.value), 0.0};
  }
  return s;
}

double s_f(const AcceptanceFn& f, const MinLengthParams& params) { return s_f_sup(f, params).value; }

double s_f_gaussian_bound(double sigma, double beta) {
  if (!(sigma > 0.0) || !(beta > 0.0)) throw InvalidParameter("sigma and beta must be > 0");
  return std::sqrt(num::kPi / (2.0 * sigma * sigma * beta));
}

}  // namespace minlen
