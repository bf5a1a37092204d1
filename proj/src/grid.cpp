#include "minlen/grid.hpp"

#include <algorithm>
#include <cmath>

#include "minlen/error.hpp"
#include "minlen/numerics.hpp"

namespace minlen {

std::string_view to_string(Domain d) {
  switch (d) {
    case Domain::Q: return "Q";
    case Domain::X: return "X";
    case Domain::K: return "K";
    case Domain::Zeta: return "ZETA";
    case Domain::Xi: return "XI";
  }
  return "?";
}

double CoordinateMap::gap(double s) const {
  return 2.0 * q0_ / (std::exp(2.0 * std::abs(s)) + 1.0);
}

double CoordinateMap::q_of_native(double s) const {
  if (kind_ == Kind::Identity) return s;
  return q0_ * std::tanh(s);
}

double CoordinateMap::dq_ds(double s) const {
  if (kind_ == Kind::Identity) return 1.0;
  const double e = std::exp(-2.0 * std::abs(s));
  return q0_ * 4.0 * e / ((1.0 + e) * (1.0 + e));
}

double CoordinateMap::one_plus_beta_k2(double s) const {
  if (kind_ != Kind::TanhK) return 1.0;
  const double r = std::sqrt(beta_);
  const double q = q_of_native(s);
  if (std::abs(q) <= 0.5 * q0_) {
    const double t = std::tan(r * q);
    return 1.0 + t * t;
  }
  const double sn = std::sin(r * gap(s));
  return 1.0 / (sn * sn);
}

double CoordinateMap::log_one_plus_beta_k2(double s) const {
  if (kind_ != Kind::TanhK) return 0.0;
  const double r = std::sqrt(beta_);
  const double q = q_of_native(s);
  if (std::abs(q) <= 0.5 * q0_) {
    const double t = std::tan(r * q);
    return std::log1p(t * t);
  }
  return -2.0 * std::log(std::sin(r * gap(s)));
}

double CoordinateMap::to_physical(double s) const {
  switch (kind_) {
    case Kind::Identity: return s;
    case Kind::TanhQ: return q0_ * std::tanh(s);
    case Kind::TanhK: {
      const double r = std::sqrt(beta_);
      const double q = q_of_native(s);
      if (std::abs(q) <= 0.5 * q0_) return std::tan(r * q) / r;
      const double k = 1.0 / (r * std::tan(r * gap(s)));
      return s < 0 ? -k : k;
    }
  }
  return s;
}

double CoordinateMap::to_native(double t) const {
  switch (kind_) {
    case Kind::Identity: return t;
    case Kind::TanhQ: {
      if (std::abs(t) >= q0_) throw DomainError("q outside (-q0, q0)");
      return std::atanh(t / q0_);
    }
    case Kind::TanhK: {
      const double r = std::sqrt(beta_);
      if (std::abs(r * t) <= 1.0) return std::atanh(std::atan(r * t) / (r * q0_));
      const double d = std::atan(1.0 / (r * std::abs(t))) / r;
      const double s = 0.5 * std::log((2.0 * q0_ - d) / d);
      return t < 0 ? -s : s;
    }
  }
  return t;
}

double CoordinateMap::jacobian(double s) const {
  switch (kind_) {
    case Kind::Identity: return 1.0;
    case Kind::TanhQ: return dq_ds(s);
    case Kind::TanhK: return one_plus_beta_k2(s) * dq_ds(s);
  }
  return 1.0;
}

Grid::Grid(Domain domain, CoordinateMap map, std::vector<double> breaks, int order)
    : domain_(domain), map_(map), breaks_(std::move(breaks)), order_(order) {
  if (breaks_.size() < 2 || order_ < 1) throw InvalidParameter("grid needs >= 1 panel");
  for (std::size_t i = 1; i < breaks_.size(); ++i)
    if (!(breaks_[i] > breaks_[i - 1])) throw InvalidParameter("grid breaks must increase");
  const num::GaussRule& rule = num::gauss_legendre(order_);
  const std::size_t n = panel_count() * order_;
  nodes_.resize(n);
  weights_.resize(n);
  native_.resize(n);
  native_weights_.resize(n);
  jacobians_.resize(n);
  for (std::size_t p = 0; p < panel_count(); ++p) {
    const double a = breaks_[p], b = breaks_[p + 1];
    const double h = 0.5 * (b - a), m = 0.5 * (a + b);
    for (int i = 0; i < order_; ++i) {
      const std::size_t j = p * order_ + i;
      native_[j] = m + h * rule.x[i];
      native_weights_[j] = h * rule.w[i];
      jacobians_[j] = map_.jacobian(native_[j]);
      nodes_[j] = map_.to_physical(native_[j]);
      weights_[j] = native_weights_[j] * jacobians_[j];
    }
  }
}

Grid Grid::uniform(Domain domain, CoordinateMap map, double lo, double hi, std::size_t panels,
                   int order) {
  std::vector<double> breaks(panels + 1);
  for (std::size_t i = 0; i <= panels; ++i)
    breaks[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(panels);
  breaks.back() = hi;
  return Grid(domain, map, std::move(breaks), order);
}

std::size_t Grid::locate(double s) const {
  if (s <= breaks_.front()) return 0;
  if (s >= breaks_.back()) return panel_count() - 1;
  auto it = std::upper_bound(breaks_.begin(), breaks_.end(), s);
  return static_cast<std::size_t>(it - breaks_.begin()) - 1;
}

Grid Grid::refined() const {
  std::vector<double> b;
  b.reserve(2 * breaks_.size());
  for (std::size_t i = 0; i + 1 < breaks_.size(); ++i) {
    b.push_back(breaks_[i]);
    b.push_back(0.5 * (breaks_[i] + breaks_[i + 1]));
  }
  b.push_back(breaks_.back());
  return Grid(domain_, map_, std::move(b), order_);
}

}  // namespace minlen
