#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace minlen {

/// Which physical axis a grid or density lives on.
enum class Domain { Q, X, K, Zeta, Xi };

std::string_view to_string(Domain d);

/// Monotone map from the native panel coordinate s to the physical coordinate t.
///
/// Identity grids use t = s.  Auxiliary-momentum grids use q = q0 tanh(s), which
/// clusters nodes exponentially toward the open ends of (-q0, q0).  Physical
/// wavenumber grids share that native coordinate and map it on through
/// k = tan(sqrt(beta) q) / sqrt(beta), so every K node is the image of a Q node.
/// Near the ends everything is evaluated from the distance to the end point
/// (the "gap"), never from q itself, so k keeps full relative precision out to
/// |k| ~ 1e14.
class CoordinateMap {
 public:
  enum class Kind { Identity, TanhQ, TanhK };

  static CoordinateMap identity() { return CoordinateMap(Kind::Identity, 0.0, 0.0); }
  static CoordinateMap tanh_q(double q0) { return CoordinateMap(Kind::TanhQ, q0, 0.0); }
  static CoordinateMap tanh_k(double q0, double beta) {
    return CoordinateMap(Kind::TanhK, q0, beta);
  }

  Kind kind() const { return kind_; }
  double q0() const { return q0_; }
  double beta() const { return beta_; }

  double to_physical(double s) const;
  double to_native(double t) const;
  /// dt/ds
  double jacobian(double s) const;

  // Helpers for the tanh maps.
  double q_of_native(double s) const;
  double gap(double s) const;
  double dq_ds(double s) const;
  /// 1 + beta k(s)^2 and its logarithm, both accurate near the ends.
  double one_plus_beta_k2(double s) const;
  double log_one_plus_beta_k2(double s) const;

  bool operator==(const CoordinateMap&) const = default;

 private:
  CoordinateMap(Kind kind, double q0, double beta) : kind_(kind), q0_(q0), beta_(beta) {}
  Kind kind_;
  double q0_;
  double beta_;
};

/// Composite Gauss-Legendre grid: panels in the native coordinate, `order`
/// nodes per panel, nodes and weights reported in the physical coordinate.
class Grid {
 public:
  Grid() = default;
  Grid(Domain domain, CoordinateMap map, std::vector<double> breaks, int order);

  static Grid uniform(Domain domain, CoordinateMap map, double lo, double hi,
                      std::size_t panels, int order);

  Domain domain() const { return domain_; }
  const CoordinateMap& map() const { return map_; }
  int order() const { return order_; }
  std::size_t size() const { return nodes_.size(); }
  std::size_t panel_count() const { return breaks_.empty() ? 0 : breaks_.size() - 1; }

  std::span<const double> breaks() const { return breaks_; }
  std::span<const double> nodes() const { return nodes_; }
  std::span<const double> weights() const { return weights_; }
  std::span<const double> native_nodes() const { return native_; }
  std::span<const double> native_weights() const { return native_weights_; }
  /// dt/ds at each node.
  std::span<const double> jacobians() const { return jacobians_; }

  double native_lower() const { return breaks_.front(); }
  double native_upper() const { return breaks_.back(); }
  double lower() const { return map_.to_physical(breaks_.front()); }
  double upper() const { return map_.to_physical(breaks_.back()); }

  /// Panel containing native coordinate s (clamped to the valid range).
  std::size_t locate(double s) const;
  /// Offset of the first node of panel p.
  std::size_t panel_offset(std::size_t p) const { return p * static_cast<std::size_t>(order_); }

  /// Same panels with every panel split in two.
  Grid refined() const;

 private:
  Domain domain_ = Domain::X;
  CoordinateMap map_ = CoordinateMap::identity();
  std::vector<double> breaks_;
  int order_ = 0;
  std::vector<double> nodes_, weights_, native_, native_weights_, jacobians_;
};

}  // namespace minlen
