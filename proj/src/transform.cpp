#include "minlen/transform.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "minlen/error.hpp"
#include "minlen/kernels.hpp"
#include "minlen/numerics.hpp"

namespace minlen {

namespace {

constexpr int kOrder = 12;
constexpr int kWaveOrder = 16;
constexpr int kMaxWavePanels = 4096;
constexpr double kMissingMass = 1e-13;
constexpr double kFirstReach = 16.0;   // periods
constexpr double kLastReach = 512.0;   // periods
constexpr double kCalibration = 0.05;  // tolerated relative miscalibration of a fitted tail

const double kInvSqrt2Pi = 1.0 / std::sqrt(2.0 * num::kPi);

/// phi on equal q panels, ready for the panel Fourier kernel.
class Wave {
 public:
  explicit Wave(const PureState& s) : half_(s.support()) {
    const num::GaussRule& rule = num::gauss_legendre(kWaveOrder);
    std::vector<cplx> vals(kWaveOrder);
    for (panels_ = 4;; panels_ *= 2) {
      width_ = 2.0 * half_ / panels_;
      coeffs_.assign(static_cast<std::size_t>(panels_) * kWaveOrder, cplx{});
      double scale = 0.0, tail = 0.0;
      for (int p = 0; p < panels_; ++p) {
        for (int i = 0; i < kWaveOrder; ++i) {
          vals[i] = s.amplitude(-half_ + (p + 0.5 + 0.5 * rule.x[i]) * width_);
          scale = std::max(scale, std::abs(vals[i]));
        }
        std::span<cplx> c(coeffs_.data() + static_cast<std::size_t>(p) * kWaveOrder, kWaveOrder);
        num::legendre_fit<cplx>(vals, rule, c);
        tail = std::max(tail, std::abs(c[kWaveOrder - 1]) + std::abs(c[kWaveOrder - 2]));
      }
      if (tail <= 1e-13 * scale) break;
      if (panels_ >= kMaxWavePanels)
        throw ResolutionError("amplitude too oscillatory for the Fourier panels");
    }
  }

  double support() const { return half_; }

  void eval(std::span<const double> x, std::span<cplx> out) const {
    kernels::fourier_parallel(series(), 1.0, x, out);
    for (cplx& v : out) v *= kInvSqrt2Pi;
  }

  cplx at(double x) const {
    cplx v;
    kernels::fourier_serial(series(), 1.0, std::span<const double>(&x, 1), std::span<cplx>(&v, 1));
    return v * kInvSqrt2Pi;
  }

 private:
  kernels::PanelSeries series() const {
    return {-half_, width_, panels_, kWaveOrder, coeffs_};
  }

  double half_;
  double width_ = 0.0;
  int panels_ = 0;
  std::vector<cplx> coeffs_;
};

/// sign(k) (pi/2 - Si(|k| L)) = int_L^inf sin(k x)/x dx
double sine_tail(double k, double L) {
  if (k == 0.0) return 0.0;
  double si, ci;
  num::sine_cosine_integrals(std::abs(k) * L, si, ci);
  return k > 0.0 ? 0.5 * num::kPi - si : si - 0.5 * num::kPi;
}

/// int_L^inf cos(k x)/x^2 dx
double cosine_tail2(double k, double L) {
  return std::cos(k * L) / L - k * sine_tail(k, L);
}

/// Solves the small dense complex system a z = b in place (partial pivoting).
void solve(std::array<std::array<cplx, 4>, 4>& a, std::array<cplx, 4>& b) {
  for (int c = 0; c < 4; ++c) {
    int piv = c;
    for (int r = c + 1; r < 4; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    std::swap(a[c], a[piv]);
    std::swap(b[c], b[piv]);
    if (std::abs(a[c][c]) == 0.0) throw ResolutionError("tail fit is singular");
    for (int r = c + 1; r < 4; ++r) {
      const cplx f = a[r][c] / a[c][c];
      for (int k = c; k < 4; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  for (int c = 3; c >= 0; --c) {
    for (int k = c + 1; k < 4; ++k) b[c] -= a[c][k] * b[k];
    b[c] /= a[c][c];
  }
}

Grid union_grid(const MixedState& state) {
  const Grid& first = state.components().front().state.grid();
  std::vector<double> br;
  for (const auto& c : state.components()) {
    if (!(c.state.grid().map() == first.map()) || c.state.grid().order() != first.order())
      throw InvalidParameter("mixture components use incompatible grids");
    const auto b = c.state.grid().breaks();
    br.insert(br.end(), b.begin(), b.end());
  }
  std::sort(br.begin(), br.end());
  std::vector<double> out;
  for (double b : br)
    if (out.empty() || b - out.back() > 1e-12 * std::max(1.0, std::abs(b))) out.push_back(b);
  return Grid(Domain::Q, first.map(), out, first.order());
}

}  // namespace

double k_of_q(double q, const MinLengthParams& params) {
  if (!params.deformed()) return q;
  if (!(std::abs(q) < params.q0)) throw DomainError("|q| must be below q0");
  const double rb = std::sqrt(params.beta);
  if (std::abs(q) < 0.5 * params.q0) return std::tan(rb * q) / rb;
  // tan(pi/2 - rb gap) = 1 / tan(rb gap)
  return std::copysign(1.0 / (rb * std::tan(rb * (params.q0 - std::abs(q)))), q);
}

double q_of_k(double k, const MinLengthParams& params) {
  if (!std::isfinite(k)) throw DomainError("k must be finite");
  if (!params.deformed()) return k;
  const double rb = std::sqrt(params.beta);
  return std::atan(rb * k) / rb;
}

std::vector<cplx> fourier_q_to_x(const PureState& state, const Grid& x_grid) {
  std::vector<cplx> out(x_grid.size());
  Wave(state).eval(x_grid.nodes(), out);
  return out;
}

PureState fourier_x_to_q(const Grid& x_grid, std::span<const cplx> psi,
                         const MinLengthParams& params, double q_cutoff) {
  if (psi.size() != x_grid.size()) throw InvalidParameter("psi does not match the X grid");
  if (x_grid.map().kind() != CoordinateMap::Kind::Identity)
    throw InvalidParameter("fourier_x_to_q needs an identity-mapped X grid");
  const auto br = x_grid.breaks();
  const int P = static_cast<int>(x_grid.panel_count());
  const double h = (br.back() - br.front()) / P;
  for (int p = 0; p < P; ++p)
    if (std::abs(br[p + 1] - br[p] - h) > 1e-9 * h)
      throw InvalidParameter("fourier_x_to_q needs equal X panels");
  const double L = br.back();
  if (std::abs(L + br.front()) > 1e-9 * L) throw InvalidParameter("X grid must be symmetric");
  if (!params.deformed() && !(q_cutoff > 0.0))
    throw InvalidParameter("beta = 0 needs a q cutoff");

  const int n = x_grid.order();
  const num::GaussRule& rule = num::gauss_legendre(n);
  std::vector<cplx> coeffs(psi.size());
  for (int p = 0; p < P; ++p) {
    const std::size_t off = x_grid.panel_offset(p);
    num::legendre_fit<cplx>(psi.subspan(off, n), rule, std::span<cplx>(coeffs.data() + off, n));
  }
  const kernels::PanelSeries series{br.front(), h, P, n, coeffs};

  // Asymptotic continuation psi ~ e^{iQx}(a+/(ix) + b+/x^2) - e^{-iQx}(a-/(ix) + b-/x^2),
  // fitted by least squares on the outer quarter of the grid (columns scaled by L).
  std::array<cplx, 4> z{};
  const double Q = params.deformed() ? params.q0 : q_cutoff;
  double peak = 0.0, edge = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    peak = std::max(peak, std::abs(psi[i]));
    if (std::abs(x_grid.nodes()[i]) >= 0.75 * L) edge = std::max(edge, std::abs(psi[i]));
  }
  const bool fit_tail = params.deformed() && edge > 1e-14 * peak;
  if (fit_tail) {
    std::array<std::array<cplx, 4>, 4> a{};
    std::array<cplx, 4> b{};
    const cplx I(0.0, 1.0);
    for (std::size_t i = 0; i < psi.size(); ++i) {
      const double x = x_grid.nodes()[i];
      if (std::abs(x) < 0.75 * L) continue;
      const cplx ep = std::polar(1.0, Q * x), em = std::conj(ep);
      const std::array<cplx, 4> row{ep * (L / (I * x)), ep * (L * L / (x * x)),
                                    -em * (L / (I * x)), -em * (L * L / (x * x))};
      for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) a[r][c] += std::conj(row[r]) * row[c];
        b[r] += std::conj(row[r]) * psi[i];
      }
    }
    solve(a, b);
    z = {b[0] * L, b[1] * L * L, b[2] * L, b[3] * L * L};
  }

  auto phi = [&](double q, double gap) {
    cplx grid_part;
    kernels::fourier_serial(series, -1.0, std::span<const double>(&q, 1),
                            std::span<cplx>(&grid_part, 1));
    cplx tail = 0.0;
    if (fit_tail) {
      // Q - q and -Q - q taken from the gap so they stay exact next to the ends
      const double kp = q > 0 ? gap : 2 * Q - gap;
      const double km = q > 0 ? -(2 * Q - gap) : -gap;
      tail = 2.0 * (z[0] * sine_tail(kp, L) + z[1] * cosine_tail2(kp, L) -
                    z[2] * sine_tail(km, L) - z[3] * cosine_tail2(km, L));
    }
    return kInvSqrt2Pi * (grid_part + tail);
  };
  return tabulate_state(params, phi, "", params.deformed() ? 0.0 : q_cutoff, 1e-9);
}

DensityFn q_density(const MixedState& state) {
  const Grid grid = union_grid(state);
  std::vector<double> v(grid.size(), 0.0);
  for (const auto& c : state.components()) {
    for (std::size_t i = 0; i < v.size(); ++i)
      v[i] += c.weight * std::norm(c.state.amplitude_native(grid.native_nodes()[i]));
  }
  return DensityFn(grid, std::move(v));
}

DensityFn density_q_to_k(const DensityFn& v, const MinLengthParams& params) {
  if (v.domain() != Domain::Q) throw InvalidParameter("density_q_to_k needs a Q density");
  const Grid& g = v.grid();
  const auto br = g.breaks();
  if (!params.deformed()) {
    Grid k(Domain::K, g.map(), std::vector<double>(br.begin(), br.end()), g.order());
    return DensityFn(std::move(k), std::vector<double>(v.values().begin(), v.values().end()));
  }
  Grid k(Domain::K, CoordinateMap::tanh_k(params.q0, params.beta),
         std::vector<double>(br.begin(), br.end()), g.order());
  std::vector<double> u(k.size());
  for (std::size_t i = 0; i < u.size(); ++i)
    u[i] = v.values()[i] / k.map().one_plus_beta_k2(k.native_nodes()[i]);
  DensityFn bare(k, u);
  auto f = [&bare](double t) { return bare(t); };
  auto right = fit_power_tail(f, k.upper(), 1, 0.0, 1.0 / 16);
  auto left = fit_power_tail(f, k.lower(), -1, 0.0, 1.0 / 16);
  return DensityFn(std::move(k), std::move(u), 0.0, left, right);
}

PositionDensity position_density(const MixedState& state) {
  std::vector<Wave> waves;
  double Q = 0.0, total = 0.0;
  for (const auto& c : state.components()) {
    waves.emplace_back(c.state);
    Q = std::max(Q, waves.back().support());
    total += c.weight * c.state.norm2();
  }
  const double T = num::kPi / Q;
  auto sample = [&](const Grid& g) {
    std::vector<double> w(g.size(), 0.0);
    std::vector<cplx> psi(g.size());
    for (std::size_t c = 0; c < waves.size(); ++c) {
      waves[c].eval(g.nodes(), psi);
      const double lambda = state.components()[c].weight;
      for (std::size_t i = 0; i < w.size(); ++i) w[i] += lambda * std::norm(psi[i]);
    }
    return w;
  };

  double L = kFirstReach * T;
  Grid grid;
  std::vector<double> w;
  double grid_mass = 0.0;
  for (;; L *= 2.0) {
    grid = Grid::uniform(Domain::X, CoordinateMap::identity(), -L, L,
                         static_cast<std::size_t>(std::llround(4.0 * L / T)), kOrder);
    w = sample(grid);
    grid_mass = DensityFn(grid, w).grid_mass();
    const double missing = total - grid_mass;
    if (missing < kMissingMass)
      return {DensityFn(grid, std::move(w), std::max(missing, 0.0)), grid_mass};
    if (L >= kLastReach * T) break;
  }

  auto f = [&](double x) {
    double s = 0.0;
    for (std::size_t c = 0; c < waves.size(); ++c)
      s += state.components()[c].weight * std::norm(waves[c].at(x));
    return s;
  };
  auto right = fit_power_tail(f, L, 1, T);
  auto left = fit_power_tail(f, -L, -1, T);
  const double raw = (right ? right->mass(L) : 0.0) + (left ? left->mass(L) : 0.0);
  const double missing = total - grid_mass;
  if (!(raw > 0.0)) return {DensityFn(grid, std::move(w), missing), grid_mass};
  const double factor = missing / raw;
  if (std::abs(factor - 1.0) > kCalibration)
    throw ResolutionError("position tail model does not account for the missing mass");
  if (right) right = right->scaled(factor);
  if (left) left = left->scaled(factor);
  return {DensityFn(grid, std::move(w), 0.0, left, right), grid_mass + raw};
}

RepresentationBundle bundle(const MixedState& state) {
  RepresentationBundle b;
  b.source = state;
  b.v_q = q_density(state);
  b.u_k = density_q_to_k(b.v_q, state.params());
  PositionDensity w = position_density(state);
  b.w_x = std::move(w.density);
  b.parseval_mass = w.parseval_mass;
  return b;
}

}  // namespace minlen
