#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "minlen/core.hpp"
#include "minlen/density.hpp"
#include "minlen/grid.hpp"

namespace minlen {

/// The smearing profile |f(zeta)|^2 of a finite-resolution detector.
class AcceptanceFn {
 public:
  enum class Profile { Gaussian, Custom };

  /// |f|^2 = N(0, sigma^2).
  static AcceptanceFn gaussian(double sigma);
  /// |f|^2 tabulated on a compact grid; must integrate to 1 within 1e-10.
  static AcceptanceFn custom(DensityFn profile);

  Profile profile() const { return profile_; }
  bool normalized() const { return true; }
  /// sigma for the Gaussian; the standard deviation of |f|^2 otherwise.
  double sigma() const { return sigma_; }
  /// |f(z)|^2
  double operator()(double z) const;
  /// |f|^2 vanishes (below 1e-20 of its peak, for the Gaussian) outside [lower, upper].
  double lower() const { return lower_; }
  double upper() const { return upper_; }
  /// Even profiles have their J maximum certified at zeta = 0.
  bool symmetric() const { return symmetric_; }
  /// The tabulated profile (custom profiles only).
  const DensityFn* table() const { return table_.get(); }

 private:
  Profile profile_ = Profile::Gaussian;
  double sigma_ = 1.0;
  double lower_ = -10.0, upper_ = 10.0;
  bool symmetric_ = true;
  std::shared_ptr<const DensityFn> table_;
};

AcceptanceFn gaussian_acceptance(double sigma);

/// U(zeta) = int |f(zeta - t)|^2 rho(t) dt.  K input gives a Zeta density, X
/// input a Xi density.  The output grid is chosen and refined automatically.
DensityFn smear(const DensityFn& density, const AcceptanceFn& f);
/// Same on a caller-supplied grid (identity or tanh-k map).  Throws
/// ResolutionError when more than 1e-6 of the mass falls outside it.
DensityFn smear(const DensityFn& density, const AcceptanceFn& f, const Grid& out_grid);

/// J(zeta) = int |f(zeta - k)|^2 / (1 + beta k^2) dk at each node.
std::vector<double> j_profile(const AcceptanceFn& f, const MinLengthParams& params,
                              const Grid& zeta_grid);
double j_value(const AcceptanceFn& f, const MinLengthParams& params, double zeta);

struct SupValue {
  double value;
  double argmax;
};

/// sup_zeta J(zeta): a coarse scan followed by golden-section refinement.
SupValue s_f_sup(const AcceptanceFn& f, const MinLengthParams& params);
double s_f(const AcceptanceFn& f, const MinLengthParams& params);

/// sqrt(pi / (2 sigma^2 beta)), the closed-form bound for Gaussian f.
double s_f_gaussian_bound(double sigma, double beta);

}  // namespace minlen
