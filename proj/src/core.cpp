#include "minlen/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "minlen/error.hpp"
#include "minlen/numerics.hpp"

namespace minlen {

namespace {

constexpr int kOrder = 12;
constexpr double kNativeSpan = 17.0;  // gap at the ends ~ 2 q0 e^{-34}
constexpr std::size_t kMaxPanels = 8192;

}  // namespace

MinLengthParams make_params(double beta) {
  if (!std::isfinite(beta) || beta < 0.0)
    throw InvalidParameter("beta must be finite and >= 0");
  if (beta == 0.0) return {0.0, kInf};
  return {beta, num::kPi / (2.0 * std::sqrt(beta))};
}

OrderPair make_order_pair(double alpha, double gamma) {
  if (alpha == 1.0 && gamma == 1.0) return {1.0, 1.0};
  if (!(alpha > 0.0) || !(gamma > 0.0) || std::abs(1.0 / alpha + 1.0 / gamma - 2.0) > 1e-12)
    throw InvalidParameter("orders must satisfy 1/alpha + 1/gamma = 2");
  return {alpha, gamma};
}

PureState::PureState(MinLengthParams params, Grid grid, std::vector<cplx> amplitudes,
                     std::string label)
    : params_(params), grid_(std::move(grid)), amp_(std::move(amplitudes)),
      label_(std::move(label)) {
  if (amp_.size() != grid_.size()) throw InvalidParameter("amplitudes do not match grid");
  if (grid_.domain() != Domain::Q) throw InvalidParameter("state grid must be tagged Q");
  if (params_.deformed()) {
    for (double q : grid_.nodes())
      if (!(std::abs(q) < params_.q0)) throw InvalidParameter("Q node outside (-q0, q0)");
  }
  const int n = grid_.order();
  const num::GaussRule& rule = num::gauss_legendre(n);
  coeffs_.assign(amp_.size(), cplx{});
  for (std::size_t p = 0; p < grid_.panel_count(); ++p) {
    const std::size_t off = grid_.panel_offset(p);
    num::legendre_fit<cplx>(std::span<const cplx>(amp_.data() + off, n), rule,
                            std::span<cplx>(coeffs_.data() + off, n));
  }
}

double PureState::support() const {
  return params_.deformed() ? params_.q0 : std::max(-grid_.lower(), grid_.upper());
}

cplx PureState::amplitude_native(double s) const {
  const auto br = grid_.breaks();
  if (!params_.deformed() && (s < br.front() || s > br.back())) return 0.0;
  s = std::clamp(s, br.front(), br.back());
  const std::size_t p = grid_.locate(s);
  const double tau = (2.0 * s - br[p] - br[p + 1]) / (br[p + 1] - br[p]);
  return num::legendre_series<cplx>(
      std::span<const cplx>(coeffs_.data() + grid_.panel_offset(p), grid_.order()), tau);
}

cplx PureState::derivative_native(double s) const {
  const auto br = grid_.breaks();
  if (!params_.deformed() && (s < br.front() || s > br.back())) return 0.0;
  s = std::clamp(s, br.front(), br.back());
  const std::size_t p = grid_.locate(s);
  const double tau = (2.0 * s - br[p] - br[p + 1]) / (br[p + 1] - br[p]);
  const cplx d = num::legendre_series_derivative<cplx>(
      std::span<const cplx>(coeffs_.data() + grid_.panel_offset(p), grid_.order()), tau);
  return d * (2.0 / (br[p + 1] - br[p])) / grid_.map().jacobian(s);
}

cplx PureState::amplitude(double q) const {
  if (!(std::abs(q) < support())) return 0.0;
  return amplitude_native(grid_.map().to_native(q));
}

double PureState::norm2() const {
  const auto w = grid_.weights();
  double s = 0.0;
  for (std::size_t i = 0; i < amp_.size(); ++i) s += std::norm(amp_[i]) * w[i];
  return s;
}

PureState PureState::resampled(const Grid& grid) const {
  if (!(grid.map() == grid_.map())) throw InvalidParameter("resampling needs the same map");
  std::vector<cplx> a(grid.size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = amplitude_native(grid.native_nodes()[i]);
  return PureState(params_, grid, std::move(a), label_);
}

PureState PureState::scaled(cplx factor) const {
  std::vector<cplx> a = amp_;
  for (cplx& x : a) x *= factor;
  return PureState(params_, grid_, std::move(a), label_);
}

MixedState::MixedState(std::vector<Component> components) : components_(std::move(components)) {
  if (components_.empty()) throw InvalidParameter("mixture needs at least one component");
  double total = 0.0;
  for (const Component& c : components_) {
    if (!(c.weight > 0.0 && c.weight <= 1.0))
      throw InvalidParameter("mixture weights must lie in (0, 1]");
    if (c.state.params().beta != components_.front().state.params().beta)
      throw InvalidParameter("mixture components must share beta");
    total += c.weight;
  }
  if (std::abs(total - 1.0) > 1e-12) throw InvalidParameter("mixture weights must sum to 1");
}

std::string MixedState::label() const {
  if (components_.size() == 1) return components_.front().state.label();
  std::ostringstream os;
  os << "mix(";
  for (std::size_t i = 0; i < components_.size(); ++i) {
    if (i) os << ",";
    os << components_[i].weight << "*" << components_[i].state.label();
  }
  os << ")";
  return os.str();
}

PureState normalize(const PureState& state) {
  const double n2 = state.norm2();
  if (!(n2 > 1e-300) || !std::isfinite(n2)) throw DegenerateState("state has zero norm");
  return state.scaled(1.0 / std::sqrt(n2));
}

std::string_view to_string(CatalogName name) {
  switch (name) {
    case CatalogName::UniformQ: return "uniform_q";
    case CatalogName::RaisedCosineQ: return "raised_cosine_q";
    case CatalogName::TruncatedGaussianQ: return "truncated_gaussian_q";
    case CatalogName::RandomFourierQ: return "random_fourier_q";
  }
  return "?";
}

CatalogName parse_catalog_name(std::string_view name) {
  for (CatalogName c : all_catalog_names())
    if (to_string(c) == name) return c;
  throw InvalidParameter("unknown catalog state '" + std::string(name) + "'");
}

std::vector<CatalogName> all_catalog_names() {
  return {CatalogName::UniformQ, CatalogName::RaisedCosineQ, CatalogName::TruncatedGaussianQ,
          CatalogName::RandomFourierQ};
}

PureState tabulate_state(const MinLengthParams& params,
                         const std::function<cplx(double, double)>& phi, std::string label,
                         double cutoff, double tol) {
  CoordinateMap map = params.deformed() ? CoordinateMap::tanh_q(params.q0)
                                        : CoordinateMap::identity();
  std::vector<double> breaks;
  if (params.deformed()) {
    for (int i = 0; i <= 68; ++i) breaks.push_back(-kNativeSpan + i * (2 * kNativeSpan / 68));
  } else {
    if (!(cutoff > 0.0)) throw InvalidParameter("beta = 0 needs a finite q cutoff");
    for (int i = 0; i <= 32; ++i) breaks.push_back(-cutoff + i * (2 * cutoff / 32));
  }
  auto eval = [&](double s) {
    const double q = map.to_physical(s);
    const double gap = params.deformed() ? map.gap(s) : kInf;
    return phi(q, gap);
  };
  const num::GaussRule& rule = num::gauss_legendre(kOrder);
  std::vector<cplx> vals(kOrder), c(kOrder);
  for (int pass = 0;; ++pass) {
    double scale = 0.0;
    std::vector<double> tails(breaks.size() - 1);
    for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
      const double a = breaks[p], b = breaks[p + 1];
      for (int i = 0; i < kOrder; ++i) {
        vals[i] = eval(0.5 * (a + b) + 0.5 * (b - a) * rule.x[i]);
        scale = std::max(scale, std::abs(vals[i]));
      }
      num::legendre_fit<cplx>(vals, rule, c);
      tails[p] = std::abs(c[kOrder - 1]) + std::abs(c[kOrder - 2]) + std::abs(c[kOrder - 3]);
    }
    std::vector<double> next;
    bool split = false;
    for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
      next.push_back(breaks[p]);
      if (tails[p] > tol * scale && breaks[p + 1] - breaks[p] > 1e-6) {
        next.push_back(0.5 * (breaks[p] + breaks[p + 1]));
        split = true;
      }
    }
    next.push_back(breaks.back());
    breaks = std::move(next);
    if (!split) break;
    if (breaks.size() > kMaxPanels || pass > 40)
      throw ResolutionError("Q grid refinement exceeded its panel budget");
  }
  Grid grid(Domain::Q, map, breaks, kOrder);
  std::vector<cplx> amp(grid.size());
  for (std::size_t i = 0; i < amp.size(); ++i) amp[i] = eval(grid.native_nodes()[i]);
  return PureState(params, std::move(grid), std::move(amp), std::move(label));
}

double NormalStream::next() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  spare_ = r * std::sin(2.0 * num::kPi * u2);
  have_spare_ = true;
  return r * std::cos(2.0 * num::kPi * u2);
}

PureState catalog_state(CatalogName name, const MinLengthParams& params,
                        const std::vector<double>& shape_args,
                        std::optional<std::uint64_t> seed) {
  const double q0 = params.q0;
  const std::string base(to_string(name));
  if (!params.deformed() && name != CatalogName::TruncatedGaussianQ)
    throw InvalidParameter(base + " needs beta > 0 (the q interval is unbounded at beta = 0)");
  switch (name) {
    case CatalogName::UniformQ: {
      const double a = 1.0 / std::sqrt(2.0 * q0);
      return normalize(tabulate_state(params, [a](double, double) { return cplx(a); }, base));
    }
    case CatalogName::RaisedCosineQ: {
      const double a = 1.0 / std::sqrt(q0);
      return normalize(tabulate_state(
          params,
          [a, q0](double, double gap) { return cplx(a * std::sin(num::kPi * gap / (2 * q0))); },
          base));
    }
    case CatalogName::TruncatedGaussianQ: {
      double s = params.deformed() ? q0 / 8.0 : 1.0;
      if (!shape_args.empty()) s = shape_args[0];
      if (!(s > 0.0) || !std::isfinite(s)) throw InvalidParameter("gaussian width must be > 0");
      std::ostringstream label;
      label.precision(17);
      label << base << "(s=" << s << ")";
      return normalize(tabulate_state(
          params, [s](double q, double) { return cplx(std::exp(-q * q / (4 * s * s))); },
          label.str(), params.deformed() ? 0.0 : 14.0 * s));
    }
    case CatalogName::RandomFourierQ: {
      if (!seed) throw InvalidParameter("random_fourier_q requires a seed");
      double m = 6.0;
      if (!shape_args.empty()) m = shape_args[0];
      if (!(m >= 1.0) || m != std::floor(m) || m > 64)
        throw InvalidParameter("mode count must be an integer in [1, 64]");
      NormalStream rng(*seed);
      std::vector<cplx> coef(static_cast<std::size_t>(m));
      for (cplx& c : coef) {
        const double re = rng.next();
        const double im = rng.next();
        c = cplx(re, im) / std::sqrt(2.0);
      }
      auto phi = [coef, q0](double q, double gap) {
        cplx sum = 0.0;
        for (std::size_t j = 1; j <= coef.size(); ++j) {
          // sin(j pi (q + q0) / (2 q0)) written through the distance to the nearer end
          double v = std::sin(static_cast<double>(j) * num::kPi * gap / (2 * q0));
          if (q > 0 && j % 2 == 0) v = -v;
          sum += coef[j - 1] * v;
        }
        return sum;
      };
      return normalize(tabulate_state(params, phi, base + "#" + std::to_string(*seed)));
    }
  }
  throw InvalidParameter("unknown catalog state");
}

MomentValue moment(const DensityFn& density, int n) {
  if (n < 1) throw InvalidParameter("moment order must be positive");
  const double v = density.moment_integral(n);
  const double err = std::abs(density.grid_moment(n) - density.refined_grid_moment(n));
  return {v, err};
}

}  // namespace minlen
