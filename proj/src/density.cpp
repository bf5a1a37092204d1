#include "minlen/density.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>

#include "minlen/error.hpp"
#include "minlen/numerics.hpp"

namespace minlen {

namespace {

using cd = std::complex<double>;

constexpr int kFitSamples = 64;
constexpr int kFitHarmonics = 8;
constexpr int kPhaseSamples = 4096;
constexpr int kHarmonics = 128;

// (a + b ln u) u^{-m}, closed under differentiation.
struct LogPower {
  double a, b, m;
  double operator()(double u) const { return (a + b * std::log(u)) * std::pow(u, -m); }
  LogPower derivative() const { return {b - m * a, -m * b, m + 1.0}; }
  // int_L^inf, requires m > 1
  double integral_from(double L) const {
    const double q = m - 1.0, l = std::pow(L, -q);
    return a * l / q + b * (l * std::log(L) / q + l / (q * q));
  }
};

// Fourier coefficients c_h of a period-T function of u, G(u) = sum_h c_h e^{i h w u}.
std::vector<cd> harmonics(const std::function<double(double)>& g, double period, int samples,
                          int count) {
  std::vector<double> v(samples), u(samples);
  for (int k = 0; k < samples; ++k) {
    u[k] = period * k / samples;
    v[k] = g(u[k]);
  }
  std::vector<cd> c(count + 1);
  const double w = 2.0 * num::kPi / period;
  for (int h = 0; h <= count; ++h) {
    cd s = 0.0;
    const cd step = std::polar(1.0, -w * h * period / samples);
    cd z = 1.0;
    for (int k = 0; k < samples; ++k) {
      s += v[k] * z;
      z *= step;
      if (k % 64 == 63) z = std::polar(1.0, -w * h * u[k] - w * h * period / samples);
    }
    c[h] = s / static_cast<double>(samples);
  }
  return c;
}

// int_L^inf G(u) h(u) du: mean term in closed form plus the boundary series
// -sum_k (-1)^k h^(k)(L) e^{i kappa L} / (i kappa)^(k+1) for every harmonic.
double periodic_integral(const std::vector<cd>& c, double w, const LogPower& h, double L) {
  double s = c[0].real() * h.integral_from(L);
  const LogPower d1 = h.derivative(), d2 = d1.derivative();
  const double hv[3] = {h(L), d1(L), d2(L)};
  for (std::size_t k = 1; k < c.size(); ++k) {
    const double kappa = w * static_cast<double>(k);
    const cd ik(0.0, kappa);
    const cd e = std::polar(1.0, std::fmod(kappa * L, 2.0 * num::kPi));
    const cd term = -hv[0] / ik + hv[1] / (ik * ik) - hv[2] / (ik * ik * ik);
    s += 2.0 * (c[k] * e * term).real();
  }
  return s;
}

// int_0^inf e^{i theta x} f(x) dx for f(x) = h(v0 + x delta), |theta| small.
cd oscillatory_integral(double theta, const LogPower& h, double v0, double delta) {
  const double kappa = theta / delta;
  const double span = 40.0 / std::abs(kappa);
  const num::GaussRule& r = num::gauss_legendre(16);
  cd sum = 0.0;
  double a = v0;
  while (a < v0 + span) {
    const double b = std::min(v0 + span, a + std::min(1.0 / std::abs(kappa), 0.25 * a));
    const double hh = 0.5 * (b - a), m = 0.5 * (a + b);
    for (int i = 0; i < r.size(); ++i) {
      const double v = m + hh * r.x[i];
      sum += r.w[i] * hh * h(v) * std::polar(1.0, kappa * (v - v0));
    }
    a = b;
  }
  const cd ik(0.0, kappa);
  const LogPower d1 = h.derivative(), d2 = d1.derivative();
  const cd e = std::polar(1.0, kappa * (a - v0));
  sum += e * (-h(a) / ik + d1(a) / (ik * ik) - d2(a) / (ik * ik * ik));
  return sum / delta;
}

// sum_{i>=0} G(u0 + i delta) h(u0 + delta/2 + i delta) for periodic G.
double periodic_lattice_sum(const std::vector<cd>& c, double period, const LogPower& h,
                            double u0, double delta) {
  const double v0 = u0 + 0.5 * delta;
  const LogPower d1 = h.derivative();
  auto f = [&](int i) { return h(v0 + i * delta); };
  // Euler-Maclaurin for the non-rotating part.
  const double flat = h.integral_from(v0) / delta + 0.5 * f(0) - delta * d1(v0) / 12.0;
  double s = c[0].real() * flat;
  const double ratio = delta / period;
  const double w = 2.0 * num::kPi / period;
  double diff[5];
  for (int i = 0; i < 5; ++i) diff[i] = f(i);
  for (int k = 0; k < 4; ++k)
    for (int i = 4; i > k; --i) diff[i] -= diff[i - 1];
  // diff[k] now holds the k-th forward difference at 0.
  for (std::size_t k = 1; k < c.size(); ++k) {
    const double x = static_cast<double>(k) * ratio;
    const double theta = 2.0 * num::kPi * (x - std::round(x));
    cd sum;
    if (std::abs(theta) < 1e-12) {
      sum = flat;
    } else if (std::abs(theta) >= 0.05) {
      const cd z = std::polar(1.0, theta);
      const cd q = 1.0 / (1.0 - z);
      cd zk = 1.0, qk = q;
      for (int j = 0; j < 4; ++j) {
        sum += zk * diff[j] * qk;
        zk *= z;
        qk *= q;
      }
    } else {
      sum = oscillatory_integral(theta, h, v0, delta) + 0.5 * f(0) -
            (cd(0.0, theta) * f(0) + delta * d1(v0)) / 12.0;
    }
    const cd e = std::polar(1.0, std::fmod(w * static_cast<double>(k) * u0, 2.0 * num::kPi));
    s += 2.0 * (c[k] * e * sum).real();
  }
  return s;
}

// Tail profile as a function of the distance u = |t|.
std::function<double(double)> profile_in_u(const PowerTail& t) {
  return [&t](double u) { return std::max(0.0, t.profile(t.side * u)); };
}

std::vector<cd> tail_harmonics(const PowerTail& t, const std::function<double(double)>& g) {
  if (t.period <= 0.0) return {cd(g(0.0), 0.0)};
  return harmonics(g, t.period, kPhaseSamples, kHarmonics);
}

// Integral of rho over u in [c, inf) for the oscillating part, two terms of the
// asymptotic expansion (c >> period).
double oscillating_tail(const PowerTail& t, double c) {
  const double p = t.power;
  const double w0 = 2.0 * num::kPi / t.period;
  const double cp = std::pow(c, -p);
  double sum = 0.0;
  for (std::size_t h = 1; h < t.cos_coeffs.size(); ++h) {
    const double w = w0 * static_cast<double>(h);
    const double sn = std::sin(w * c), cs = std::cos(w * c);
    const double ic = -sn * cp / w + p * cs * cp / (c * w * w);
    const double is = cs * cp / w - p * sn * cp / (c * w * w);
    sum += t.cos_coeffs[h] * ic + t.side * t.sin_coeffs[h] * is;
  }
  return sum;
}

}  // namespace

double PowerTail::profile(double t) const {
  double v = cos_coeffs.empty() ? 0.0 : cos_coeffs[0];
  if (period <= 0.0) return v;
  const double w0 = 2.0 * num::kPi / period;
  for (std::size_t h = 1; h < cos_coeffs.size(); ++h) {
    const double a = w0 * static_cast<double>(h) * t;
    v += cos_coeffs[h] * std::cos(a) + sin_coeffs[h] * std::sin(a);
  }
  return v;
}

double PowerTail::value(double t) const {
  if (!contains(t)) return 0.0;
  return std::max(0.0, profile(t)) * std::pow(std::abs(t), -power);
}

double PowerTail::mass(double from) const {
  if (power <= 1.0) throw DivergenceError("tail mass diverges", 0.0, kInf);
  double m = cos_coeffs[0] * std::pow(from, 1.0 - power) / (power - 1.0);
  if (period > 0.0) m += oscillating_tail(*this, from);
  return m;
}

double PowerTail::power_integral(double g, double from) const {
  const double e = power * g;
  if (e <= 1.0)
    throw DivergenceError("integral of rho^alpha diverges in the tail (tail exponent " +
                              std::to_string(power) + ")",
                          0.0, kInf);
  const auto p = profile_in_u(*this);
  const auto c = tail_harmonics(*this, [&](double u) { return std::pow(p(u), g); });
  return periodic_integral(c, period > 0 ? 2.0 * num::kPi / period : 0.0, {1.0, 0.0, e}, from);
}

double PowerTail::shannon(double from) const {
  if (power <= 1.0) throw DivergenceError("tail entropy diverges", 0.0, kInf);
  const auto p = profile_in_u(*this);
  const double w = period > 0 ? 2.0 * num::kPi / period : 0.0;
  const auto c1 = tail_harmonics(*this, [&](double u) { return -num::xlogx(p(u)); });
  const auto c2 = tail_harmonics(*this, [&](double u) { return power * p(u); });
  return periodic_integral(c1, w, {1.0, 0.0, power}, from) +
         periodic_integral(c2, w, {0.0, 1.0, power}, from);
}

double PowerTail::moment(int n, double from) const {
  const double e = power - n;
  if (e <= 1.0) throw MomentDivergence("moment diverges in the tail", 0.0, kInf);
  const double sign = (n % 2 == 1) ? side : 1.0;
  const auto c = tail_harmonics(*this, profile_in_u(*this));
  return sign * periodic_integral(c, period > 0 ? 2.0 * num::kPi / period : 0.0, {1.0, 0.0, e},
                                  from);
}

double PowerTail::integral(double lo, double hi) const {
  double u0 = side > 0 ? lo : -hi;
  double u1 = side > 0 ? hi : -lo;
  u0 = std::max(u0, start);
  if (!(u1 > u0)) return 0.0;
  auto to_inf = [&](double c) { return mass(c); };
  // Far out the closed-form mass is accurate even for cells of a few periods.
  const bool far = u0 > 4096.0 * period && u1 - u0 >= period;
  if (period <= 0.0 || far || u1 - u0 > 64.0 * period) {
    return std::isinf(u1) ? to_inf(u0) : to_inf(u0) - to_inf(u1);
  }
  const num::GaussRule& r = num::gauss_legendre(10);
  const int pieces = std::max(1, static_cast<int>(std::ceil(4.0 * (u1 - u0) / period)));
  const double h = (u1 - u0) / pieces;
  double sum = 0.0;
  for (int k = 0; k < pieces; ++k) {
    const double m = u0 + (k + 0.5) * h;
    for (int i = 0; i < r.size(); ++i) sum += r.w[i] * value(side * (m + 0.5 * h * r.x[i]));
  }
  return 0.5 * h * sum;
}

PowerTail PowerTail::scaled(double factor) const {
  PowerTail t = *this;
  for (double& a : t.cos_coeffs) a *= factor;
  for (double& b : t.sin_coeffs) b *= factor;
  return t;
}

std::optional<PowerTail> fit_power_tail(const std::function<double(double)>& f, double edge,
                                        int side, double period, double ratio_point) {
  const double e = std::abs(edge);
  PowerTail tail;
  tail.side = side;
  tail.start = e;
  tail.period = period;
  auto round_power = [](double p, double tol) {
    const double r = std::round(p);
    return std::abs(p - r) < tol ? r : p;
  };
  if (period <= 0.0) {
    const double f1 = f(side * e);
    const double f2 = f(side * e * ratio_point);
    if (!(f1 > 0.0) || !(f2 > 0.0) || e * f1 < 1e-30) return std::nullopt;
    tail.power = round_power(std::log(f2 / f1) / std::log(1.0 / ratio_point), 0.05);
    tail.cos_coeffs = {f1 * std::pow(e, tail.power)};
    tail.sin_coeffs = {0.0};
    return tail;
  }
  std::vector<double> t(kFitSamples), v(kFitSamples);
  auto window_mean = [&](double end, bool keep) {
    double sum = 0.0;
    for (int i = 0; i < kFitSamples; ++i) {
      const double u = end - period + period * (i + 0.5) / kFitSamples;
      const double fv = std::max(0.0, f(side * u));
      if (keep) {
        t[i] = side * u;
        v[i] = fv;
      }
      sum += fv;
    }
    return sum / kFitSamples;
  };
  const double m1 = window_mean(e, true);
  const double m2 = window_mean(e * ratio_point, false);
  if (!(m1 > 0.0) || !(m2 > 0.0) || e * m1 < 1e-30) return std::nullopt;
  const double c1 = e - 0.5 * period, c2 = e * ratio_point - 0.5 * period;
  tail.power = round_power(std::log(m2 / m1) / std::log(c1 / c2), 0.15);
  tail.cos_coeffs.assign(kFitHarmonics + 1, 0.0);
  tail.sin_coeffs.assign(kFitHarmonics + 1, 0.0);
  const double w0 = 2.0 * num::kPi / period;
  for (int i = 0; i < kFitSamples; ++i) {
    const double pv = v[i] * std::pow(std::abs(t[i]), tail.power);
    tail.cos_coeffs[0] += pv / kFitSamples;
    for (int h = 1; h <= kFitHarmonics; ++h) {
      tail.cos_coeffs[h] += 2.0 * pv * std::cos(w0 * h * t[i]) / kFitSamples;
      tail.sin_coeffs[h] += 2.0 * pv * std::sin(w0 * h * t[i]) / kFitSamples;
    }
  }
  return tail;
}

DensityFn::DensityFn(Grid grid, std::vector<double> values, double tail_mass_bound,
                     std::optional<PowerTail> left, std::optional<PowerTail> right)
    : grid_(std::move(grid)),
      values_(std::move(values)),
      tail_mass_bound_(tail_mass_bound),
      left_(std::move(left)),
      right_(std::move(right)) {
  if (values_.size() != grid_.size()) throw InvalidParameter("density values do not match grid");
  if (left_ && left_->side != -1) throw InvalidParameter("left tail must have side -1");
  if (right_ && right_->side != 1) throw InvalidParameter("right tail must have side +1");
  for (double& v : values_) {
    if (!std::isfinite(v)) throw InvalidParameter("density value not finite");
    v = std::max(0.0, v);
  }
  const int n = grid_.order();
  const num::GaussRule& rule = num::gauss_legendre(n);
  coeffs_.assign(values_.size(), 0.0);
  panel_mass_.assign(grid_.panel_count(), 0.0);
  std::vector<double> native(n);
  const auto jac = grid_.jacobians();
  const auto w = grid_.weights();
  for (std::size_t p = 0; p < grid_.panel_count(); ++p) {
    const std::size_t off = grid_.panel_offset(p);
    double m = 0.0;
    for (int i = 0; i < n; ++i) {
      native[i] = values_[off + i] * jac[off + i];
      m += values_[off + i] * w[off + i];
    }
    num::legendre_fit<double>(native, rule, std::span<double>(coeffs_.data() + off, n));
    panel_mass_[p] = m;
  }
}

std::span<const double> DensityFn::native_coefficients(std::size_t panel) const {
  return std::span<const double>(coeffs_.data() + grid_.panel_offset(panel), grid_.order());
}

double DensityFn::native_value(double s) const {
  const auto br = grid_.breaks();
  if (s < br.front() || s > br.back()) return 0.0;
  const std::size_t p = grid_.locate(s);
  const double tau = (2.0 * s - br[p] - br[p + 1]) / (br[p + 1] - br[p]);
  return std::max(0.0, num::legendre_series<double>(native_coefficients(p), tau));
}

double DensityFn::operator()(double t) const {
  if (left_ && left_->contains(t)) return left_->value(t);
  if (right_ && right_->contains(t)) return right_->value(t);
  if (values_.empty() || t < grid_.lower() || t > grid_.upper()) return 0.0;
  const double s = std::clamp(grid_.map().to_native(t), grid_.native_lower(), grid_.native_upper());
  const double j = grid_.map().jacobian(s);
  return j > 0.0 ? native_value(s) / j : 0.0;
}

double DensityFn::grid_mass() const {
  return std::accumulate(panel_mass_.begin(), panel_mass_.end(), 0.0);
}

double DensityFn::mass() const {
  double m = grid_mass();
  if (left_) m += left_->mass(left_->start);
  if (right_) m += right_->mass(right_->start);
  return m;
}

double DensityFn::grid_integral(double a, double b) const {
  const auto br = grid_.breaks();
  const CoordinateMap& map = grid_.map();
  const double sa = std::clamp(map.to_native(a), br.front(), br.back());
  const double sb = std::clamp(map.to_native(b), br.front(), br.back());
  if (!(sb > sa)) return 0.0;
  auto piece = [&](std::size_t p, double s0, double s1) {
    const double lo = br[p], hi = br[p + 1];
    if (s0 <= lo && s1 >= hi) return panel_mass_[p];
    const double half = 0.5 * (hi - lo);
    if (s1 - s0 < 0.0625 * (hi - lo)) {
      // A thin slice: integrate directly so the result keeps relative precision.
      const num::GaussRule& r = num::gauss_legendre(8);
      const double h = 0.5 * (s1 - s0), m = 0.5 * (s0 + s1);
      double sum = 0.0;
      for (int i = 0; i < r.size(); ++i) sum += r.w[i] * native_value(m + h * r.x[i]);
      return h * sum;
    }
    const auto c = native_coefficients(p);
    const double t0 = (2.0 * s0 - lo - hi) / (hi - lo);
    const double t1 = (2.0 * s1 - lo - hi) / (hi - lo);
    return half * (num::legendre_series_integral(c, t1) - num::legendre_series_integral(c, t0));
  };
  const std::size_t pa = grid_.locate(sa), pb = grid_.locate(sb);
  if (pa == pb) return piece(pa, sa, sb);
  double sum = piece(pa, sa, br[pa + 1]);
  for (std::size_t p = pa + 1; p < pb; ++p) sum += panel_mass_[p];
  return sum + piece(pb, br[pb], sb);
}

double DensityFn::tail_functional(
    double a, double b, const std::function<double(const PowerTail&, double)>& full) const {
  double sum = 0.0;
  if (right_ && b > right_->start) {
    const double from = std::max(a, right_->start);
    if (b > from) sum += full(*right_, from) - (std::isinf(b) ? 0.0 : full(*right_, b));
  }
  if (left_ && a < -left_->start) {
    const double from = std::max(-b, left_->start);
    if (-a > from) sum += full(*left_, from) - (std::isinf(a) ? 0.0 : full(*left_, -a));
  }
  return sum;
}

double DensityFn::integral(double a, double b) const {
  if (!(b > a)) return 0.0;
  double sum = 0.0;
  if (!values_.empty()) {
    const double lo = std::max(a, grid_.lower()), hi = std::min(b, grid_.upper());
    if (hi > lo) sum += grid_integral(lo, hi);
  }
  if (right_ && b > right_->start) sum += right_->integral(std::max(a, right_->start), b);
  if (left_ && a < -left_->start) sum += left_->integral(a, std::min(b, -left_->start));
  return sum;
}

double DensityFn::panel_partial_functional(const std::function<double(double)>& f,
                                           double s_lo, double s_hi) const {
  const num::GaussRule& r = num::gauss_legendre(std::max(grid_.order(), 8));
  const double h = 0.5 * (s_hi - s_lo), m = 0.5 * (s_lo + s_hi);
  double sum = 0.0;
  for (int i = 0; i < r.size(); ++i) {
    const double s = m + h * r.x[i];
    const double j = grid_.map().jacobian(s);
    if (j > 0.0) sum += r.w[i] * f(native_value(s) / j) * j;
  }
  return h * sum;
}

double DensityFn::grid_functional(const std::function<double(double)>& f, double a,
                                  double b) const {
  if (values_.empty()) return 0.0;
  const auto br = grid_.breaks();
  const double lo = std::max(a, grid_.lower()), hi = std::min(b, grid_.upper());
  if (!(hi > lo)) return 0.0;
  const CoordinateMap& map = grid_.map();
  const double sa = std::isinf(a) || a <= grid_.lower() ? br.front()
                                                         : std::clamp(map.to_native(lo), br.front(), br.back());
  const double sb = std::isinf(b) || b >= grid_.upper() ? br.back()
                                                         : std::clamp(map.to_native(hi), br.front(), br.back());
  const std::size_t pa = grid_.locate(sa), pb = grid_.locate(sb);
  const auto w = grid_.weights();
  const int n = grid_.order();
  auto full = [&](std::size_t p) {
    double s = 0.0;
    const std::size_t off = grid_.panel_offset(p);
    for (int i = 0; i < n; ++i) s += f(values_[off + i]) * w[off + i];
    return s;
  };
  auto part = [&](std::size_t p, double s0, double s1) {
    if (s0 <= br[p] && s1 >= br[p + 1]) return full(p);
    return panel_partial_functional(f, s0, s1);
  };
  if (pa == pb) return part(pa, sa, sb);
  double sum = part(pa, sa, br[pa + 1]);
  for (std::size_t p = pa + 1; p < pb; ++p) sum += full(p);
  return sum + part(pb, br[pb], sb);
}

double DensityFn::power_integral(double g, double a, double b) const {
  const double grid =
      grid_functional([g](double r) { return r > 1e-300 ? std::pow(r, g) : 0.0; }, a, b);
  try {
    return grid + tail_functional(a, b, [g](const PowerTail& t, double from) {
             return t.power_integral(g, from);
           });
  } catch (const DivergenceError& e) {
    throw DivergenceError(e.what(), grid, e.tail_estimate());
  }
}

double DensityFn::shannon_integral(double a, double b) const {
  const double grid = grid_functional(
      [](double r) { return r > 1e-300 ? -r * std::log(r) : 0.0; }, a, b);
  return grid +
         tail_functional(a, b, [](const PowerTail& t, double from) { return t.shannon(from); });
}

double DensityFn::moment_integral(int n) const {
  const auto x = grid_.nodes();
  const auto w = grid_.weights();
  double sum = grid_moment(n);
  // Without a tail model, a moment whose integrand has not decayed at the grid
  // ends is treated as divergent.  Q densities have compact support.
  const std::size_t per = static_cast<std::size_t>(grid_.order());
  auto edge_share = [&](std::size_t p) {
    double s = 0.0;
    const std::size_t off = grid_.panel_offset(p);
    for (std::size_t i = off; i < off + per; ++i) s += std::pow(x[i], n) * values_[i] * w[i];
    return std::abs(s);
  };
  double scale = 1e-300;
  for (std::size_t i = 0; i < x.size(); ++i) scale += std::pow(std::abs(x[i]), n) * values_[i] * w[i];
  if (!values_.empty() && domain() != Domain::Q) {
    if (!left_ && edge_share(0) > 1e-7 * scale)
      throw MomentDivergence("moment integrand does not decay at the lower end", sum, edge_share(0));
    if (!right_ && edge_share(grid_.panel_count() - 1) > 1e-7 * scale)
      throw MomentDivergence("moment integrand does not decay at the upper end", sum,
                             edge_share(grid_.panel_count() - 1));
  }
  try {
    if (left_) sum += left_->moment(n, left_->start);
    if (right_) sum += right_->moment(n, right_->start);
  } catch (const DivergenceError& e) {
    throw MomentDivergence(e.what(), sum, kInf);
  }
  return sum;
}

namespace {

double refined_functional(const DensityFn& d, const std::function<double(double, double)>& f) {
  const Grid& g = d.grid();
  const auto br = g.breaks();
  const num::GaussRule& r = num::gauss_legendre(g.order());
  double sum = 0.0;
  for (std::size_t p = 0; p < g.panel_count(); ++p) {
    const auto c = d.native_coefficients(p);
    const double lo = br[p], hi = br[p + 1];
    for (int half = 0; half < 2; ++half) {
      const double a = half == 0 ? lo : 0.5 * (lo + hi);
      const double h = 0.25 * (hi - lo);
      for (int i = 0; i < r.size(); ++i) {
        const double s = a + h + h * r.x[i];
        const double tau = (2.0 * s - lo - hi) / (hi - lo);
        const double j = g.map().jacobian(s);
        if (!(j > 0.0)) continue;
        const double rho = std::max(0.0, num::legendre_series<double>(c, tau)) / j;
        sum += h * r.w[i] * f(rho, g.map().to_physical(s)) * j;
      }
    }
  }
  return sum;
}

}  // namespace

double DensityFn::refined_power_integral(double g) const {
  return refined_functional(*this,
                            [g](double r, double) { return r > 1e-300 ? std::pow(r, g) : 0.0; });
}

double DensityFn::refined_shannon_integral() const {
  return refined_functional(
      *this, [](double r, double) { return r > 1e-300 ? -r * std::log(r) : 0.0; });
}

double DensityFn::grid_moment(int n) const {
  const auto x = grid_.nodes();
  const auto w = grid_.weights();
  double sum = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) sum += std::pow(x[i], n) * values_[i] * w[i];
  return sum;
}

double DensityFn::refined_grid_moment(int n) const {
  return refined_functional(*this, [n](double r, double t) { return std::pow(t, n) * r; });
}

void DensityFn::require_normalized(double tol) const {
  const double m = mass() + tail_mass_bound_;
  if (!(std::abs(m - 1.0) <= tol))
    throw ContractError("density is not normalized (mass " + std::to_string(m) + ")");
}

DensityFn DensityFn::scaled(double factor) const {
  std::vector<double> v = values_;
  for (double& x : v) x *= factor;
  std::optional<PowerTail> l, r;
  if (left_) l = left_->scaled(factor);
  if (right_) r = right_->scaled(factor);
  return DensityFn(grid_, std::move(v), tail_mass_bound_ * factor, l, r);
}

namespace {

// Cell integrals of the tail profile: B0(u) = int_0^d P(u+y) dy and
// B1(u) = int_0^d (y - d/2) P(u+y) dy.
std::pair<double, double> cell_moments_direct(const std::function<double(double)>& p,
                                              double period, double u, double d) {
  const num::GaussRule& r = num::gauss_legendre(16);
  const int pieces =
      period > 0.0 ? std::max(1, static_cast<int>(std::ceil(4.0 * d / period))) : 1;
  const double h = d / pieces;
  double b0 = 0.0, b1 = 0.0;
  for (int j = 0; j < pieces; ++j) {
    for (int i = 0; i < r.size(); ++i) {
      const double y = (j + 0.5) * h + 0.5 * h * r.x[i];
      const double v = 0.5 * h * r.w[i] * p(u + y);
      b0 += v;
      b1 += (y - 0.5 * d) * v;
    }
  }
  return {b0, b1};
}

// P is periodic, so the m whole periods of a cell d = m T + r contribute
// m C0 to B0 and sum_j (jT - d/2) C0 + m G(u) to B1, with C0 the period
// integral and G(u) = int_0^T z P(u+z) dz.
std::pair<double, double> cell_moments(const std::function<double(double)>& p, double period,
                                       double u, double d, double c0) {
  if (!(period > 0.0) || d <= period) return cell_moments_direct(p, period, u, d);
  const double m = std::floor(d / period);
  const double rest = d - m * period;
  const auto [g0, g1] = cell_moments_direct(p, period, u, period);
  double b0 = m * c0;
  double b1 = (period * m * (m - 1.0) / 2.0 - m * d / 2.0) * c0 + m * (g1 + 0.5 * period * g0);
  if (rest > 0.0) {
    const auto [r0, r1] = cell_moments_direct(p, period, u, rest);
    b0 += r0;
    b1 += (m * period - 0.5 * d) * r0 + r1 + 0.5 * rest * r0;
  }
  return {b0, b1};
}

}  // namespace

double DiscreteDist::FarTail::mass() const {
  return side > 0 ? density->integral(start, kInf) : density->integral(-kInf, start);
}

// Far cells lie inside a power tail: each cell probability is expanded as
// B0(u) v^-p - p B1(u) v^-p-1 around the cell centre v, and the lattice sums
// of the periodic coefficients are evaluated harmonic by harmonic.
namespace {

template <class Terms>
double lattice_tail(const PowerTail& t, double u0, double d, Terms&& terms) {
  const auto p = profile_in_u(t);
  const double period = t.period > 0.0 ? t.period : 1.0;
  const int samples = t.period > 0.0 ? 1024 : 1;
  std::vector<double> b0(samples), b1(samples);
  const double c0 = t.period > 0.0 ? cell_moments_direct(p, t.period, 0.0, t.period).first : 0.0;
  for (int k = 0; k < samples; ++k) {
    const auto [x0, x1] = cell_moments(p, t.period, period * k / samples, d, c0);
    b0[k] = x0;
    b1[k] = x1;
  }
  auto index = [&](double u) {
    const double x = std::fmod(u, period) / period * samples;
    return static_cast<std::size_t>(std::llround(x)) % samples;
  };
  double sum = 0.0;
  for (const auto& [g, h] : terms) {
    std::vector<cd> c;
    if (t.period > 0.0) {
      c = harmonics([&](double u) { const auto i = index(u); return g(b0[i], b1[i]); }, period,
                    samples, std::min(kHarmonics, samples / 2 - 1));
    } else {
      c = {cd(g(b0[0], b1[0]), 0.0)};
    }
    sum += periodic_lattice_sum(c, period, h, u0, d);
  }
  return sum;
}

using CellTerm = std::pair<std::function<double(double, double)>, LogPower>;

}  // namespace

double DiscreteDist::FarTail::power_sum(double alpha) const {
  const auto& tail = side > 0 ? density->right_tail() : density->left_tail();
  const double u0 = side * start;
  if (tail && u0 >= tail->start) {
    const double p = tail->power, e = p * alpha;
    if (e <= 1.0) throw DivergenceError("binned power sum diverges in the tail", 0.0, kInf);
    const std::vector<CellTerm> terms = {
        {[alpha](double b0, double) { return b0 > 0 ? std::pow(b0, alpha) : 0.0; },
         {1.0, 0.0, e}},
        {[alpha, p](double b0, double b1) {
           return b0 > 0 ? -alpha * p * std::pow(b0, alpha - 1.0) * b1 : 0.0;
         },
         {1.0, 0.0, e + 1.0}}};
    return lattice_tail(*tail, u0, width, terms);
  }
  const double a = side > 0 ? start : -kInf;
  const double b = side > 0 ? kInf : start;
  return std::pow(width, alpha - 1.0) * density->power_integral(alpha, a, b);
}

double DiscreteDist::FarTail::shannon_sum() const {
  const auto& tail = side > 0 ? density->right_tail() : density->left_tail();
  const double u0 = side * start;
  if (tail && u0 >= tail->start) {
    const double p = tail->power;
    if (p <= 1.0) throw DivergenceError("binned entropy diverges in the tail", 0.0, kInf);
    const std::vector<CellTerm> terms = {
        {[](double b0, double) { return -num::xlogx(b0); }, {1.0, 0.0, p}},
        {[p](double b0, double) { return p * b0; }, {0.0, 1.0, p}},
        {[p](double b0, double b1) { return b0 > 0 ? p * b1 * (std::log(b0) + 1.0) : 0.0; },
         {1.0, 0.0, p + 1.0}},
        {[p](double, double b1) { return -p * p * b1; }, {0.0, 1.0, p + 1.0}}};
    return lattice_tail(*tail, u0, width, terms);
  }
  const double a = side > 0 ? start : -kInf;
  const double b = side > 0 ? kInf : start;
  return density->shannon_integral(a, b) - std::log(width) * density->integral(a, b);
}

DiscreteDist::DiscreteDist(std::vector<double> edges, std::vector<double> probs,
                           std::vector<FarTail> far, double scale)
    : edges_(std::move(edges)), probs_(std::move(probs)), far_(std::move(far)), scale_(scale) {
  if (edges_.size() < 2) throw InvalidParameter("need at least 2 bin edges");
  if (probs_.size() + 1 != edges_.size()) throw InvalidParameter("probs/edges size mismatch");
  for (std::size_t i = 1; i < edges_.size(); ++i) {
    if (!(edges_[i] > edges_[i - 1])) throw InvalidParameter("bin edges must increase");
    delta_max_ = std::max(delta_max_, edges_[i] - edges_[i - 1]);
  }
  for (double& p : probs_) {
    if (!(p >= 0.0)) throw InvalidParameter("negative bin probability");
    p *= scale_;
  }
  for (const FarTail& f : far_) delta_max_ = std::max(delta_max_, f.width);
  const double t = total();
  if (std::abs(t - 1.0) > 1e-10)
    throw ContractError("bin probabilities sum to " + std::to_string(t));
}

double DiscreteDist::total() const {
  double t = std::accumulate(probs_.begin(), probs_.end(), 0.0);
  for (const FarTail& f : far_) t += scale_ * f.mass();
  return t;
}

double DiscreteDist::power_sum(double alpha) const {
  double s = 0.0;
  for (double p : probs_)
    if (p > 0.0) s += std::pow(p, alpha);
  for (const FarTail& f : far_) s += std::pow(scale_, alpha) * f.power_sum(alpha);
  return s;
}

double DiscreteDist::shannon_sum() const {
  double s = 0.0;
  for (double p : probs_) s -= num::xlogx(p);
  for (const FarTail& f : far_) s += scale_ * (f.shannon_sum() - std::log(scale_) * f.mass());
  return s;
}

}  // namespace minlen
