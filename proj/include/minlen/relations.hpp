#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "minlen/core.hpp"
#include "minlen/entropy.hpp"
#include "minlen/measurement.hpp"
#include "minlen/transform.hpp"

namespace minlen {

enum class RelationId {
  Identity,             // H(K) = H(Q) + <ln(1 + beta k^2)>
  Robertson,            // da dk >= (1 + beta <k^2>) / 2
  RobertsonVariance,    // (1 + beta <k^2>) / 2 >= (1 + beta dk^2) / 2
  JensenCorrection,     // <ln(1 + beta k^2)> <= ln(1 + beta <k^2>)
  Linearization,        // residual / beta^2 -> -<k^4> / 2
  BbmBase,              // H(Q) + H(X) >= ln(e pi)
  BbmCorrected,         // H(K) + H(X) >= ln(e pi) + correction
  SmearingMonotoneK,    // H(M) >= H(K)
  SmearingMonotoneX,    // H(N) >= H(X)
  SmearedShannon,       // H(M) + H(N) >= ln(e pi) + correction
  SmearedShannonSf,     // H(M) + H(N) >= ln(e pi / S_f)
  BinningLemmaK,        // H(p_K) >= H(K) - ln dk
  BinningLemmaX,        // H(p_X) >= H(X) - ln dx
  BinnedShannon,        // H(p_K) + H(p_X) >= ln(e pi / (dk dx)) + correction
  Beckner,              // ||v||_a <= (kappa pi)^{-(1-g)/g} ||w||_g
  BecknerTwin,          // same with v and w swapped
  RenyiNormUW,          // ||U||_a <= (S_f / kappa pi)^{(1-g)/g} ||W||_g
  RenyiNormWU,          // ||W||_a <= (S_f / kappa pi)^{(1-g)/g} ||U||_g
  RenyiSmeared,         // R_a(M) + R_g(N) >= ln(kappa pi / S_f)
  RenyiSmearedTwin,     // R_g(M) + R_a(N) >= ln(kappa pi / S_f)
  RenyiBinnedNorm,      // ||p_M||_a <= (S_f dz dxi / kappa pi)^{(1-g)/g} ||p_N||_g
  RenyiBinnedNormTwin,
  RenyiBinned,          // R_a(p_M) + R_g(p_N) >= ln(kappa pi / (S_f dz dxi))
  RenyiBinnedTwin,
  NormOrderingAlpha,    // ||p||_a <= 1
  NormOrderingGamma,    // ||p||_g >= 1
  TsallisBinned,        // H_a(p_M) + H_g(p_N) >= ln_nu(kappa pi / (S_f dz dxi))
  TsallisBinnedTwin,
  SfSubnormalized,      // S_f <= 1
  SfGaussianBound,      // S_f <= sqrt(pi / (2 sigma^2 beta))
};

std::string_view to_string(RelationId id);
/// Inverse of to_string; throws InvalidParameter for unknown names.
RelationId parse_relation_id(std::string_view name);
/// Identity-type relations hold with equality; the others are inequalities.
bool is_equality(RelationId id);

enum class Verdict { Pass, Fail, NotApplicable };
std::string_view to_string(Verdict v);

/// One certified relation.  margin = lhs - rhs; inequalities pass when
/// margin >= -tolerance, equalities when |margin| <= tolerance.
struct RelationReport {
  RelationId id = RelationId::Identity;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  double est_error = 0.0;
  double tolerance = 0.0;
  Verdict verdict = Verdict::Pass;
  std::string inputs_digest;
  std::string note;  // reason for not_applicable
};

/// Absolute slack granted to every margin on top of the propagated error.
inline constexpr double kMarginFloor = 1e-8;
inline constexpr double kErrorFactor = 4.0;

RelationReport make_report(RelationId id, double lhs, double rhs, double est_error,
                           std::string digest);
/// Recomputes tolerance and verdict from margin and est_error.
void judge(RelationReport& r, double margin_floor = kMarginFloor,
           double error_factor = kErrorFactor);
RelationReport not_applicable(RelationId id, std::string digest, std::string note);

/// kappa = sqrt(alpha^{1/(alpha-1)} gamma^{1/(gamma-1)}); e for the degenerate pair.
double kappa(const OrderPair& pair);
/// gamma = alpha / (2 alpha - 1); alpha = 1 gives the degenerate pair.
OrderPair conjugate_order(double alpha);

/// A state with its three densities, entropies and the correction term,
/// computed once and shared by the checks.
class StateAnalysis {
 public:
  explicit StateAnalysis(const MixedState& state);

  const MixedState& state() const { return bundle_.source; }
  const MinLengthParams& params() const { return bundle_.source.params(); }
  const RepresentationBundle& bundle() const { return bundle_; }
  std::shared_ptr<const DensityFn> v() const { return v_; }
  std::shared_ptr<const DensityFn> w() const { return w_; }
  std::shared_ptr<const DensityFn> u() const { return u_; }

  const EntropyValue& h_q() const { return h_q_; }
  const EntropyValue& h_x() const { return h_x_; }
  const EntropyValue& h_k() const { return h_k_; }
  /// <ln(1 + beta k^2)> and its quadrature error.
  double correction() const { return correction_; }
  double correction_error() const { return correction_error_; }

  /// "state=...;beta=..." for report digests.
  std::string digest() const;

 private:
  RepresentationBundle bundle_;
  std::shared_ptr<const DensityFn> v_, w_, u_;
  EntropyValue h_q_, h_x_, h_k_;
  double correction_ = 0.0, correction_error_ = 0.0;
};

/// <ln(1 + beta k^2)> = int v(q) ln(1 + beta k(q)^2) dq; zero at beta = 0.
double correction_term(const MixedState& state);

/// Smeared densities of an analysed state and the sup of J for the momentum profile.
class SmearedAnalysis {
 public:
  SmearedAnalysis(const StateAnalysis& base, AcceptanceFn f, AcceptanceFn g);

  const StateAnalysis& base() const { return *base_; }
  const AcceptanceFn& f() const { return f_; }
  const AcceptanceFn& g() const { return g_; }
  std::shared_ptr<const DensityFn> m() const { return m_; }
  std::shared_ptr<const DensityFn> n() const { return n_; }
  const EntropyValue& h_m() const { return h_m_; }
  const EntropyValue& h_n() const { return h_n_; }
  double s_f() const { return s_f_; }
  std::string digest() const;

 private:
  const StateAnalysis* base_;
  AcceptanceFn f_, g_;
  std::shared_ptr<const DensityFn> m_, n_;
  EntropyValue h_m_, h_n_;
  double s_f_ = 1.0;
};

/// Binning of one axis: a lattice of the given width and origin covering the
/// whole line, or explicit edges when `edges` is nonempty.
struct BinSpec {
  double width = 1.0;
  double origin = 0.0;
  std::vector<double> edges;

  /// Largest bin width (delta in the binned bounds).
  double delta() const;
  DiscreteDist apply(std::shared_ptr<const DensityFn> density) const;
  std::string digest() const;
};

// Checks on the unsmeared densities.
RelationReport check_identity(const StateAnalysis& s);
std::vector<RelationReport> check_robertson(const StateAnalysis& s);
RelationReport check_jensen(const StateAnalysis& s);
std::vector<RelationReport> check_bbm(const StateAnalysis& s);
std::vector<RelationReport> check_binned_shannon(const StateAnalysis& s, const BinSpec& bins_k,
                                                 const BinSpec& bins_x);
std::vector<RelationReport> check_beckner(const StateAnalysis& s, const OrderPair& pair);

struct LinearizationPoint {
  double beta;
  double residual;  // <ln(1 + beta k^2)> - beta <k^2>
  double ratio;     // residual / beta^2
  double target;    // -<k^4> / 2
};

/// Residual of the small-beta expansion of the correction term at each beta.
/// The report's margin is 0.1 - |ratio / target - 1| at the smallest beta.
RelationReport check_linearization(const std::function<MixedState(const MinLengthParams&)>& make_state,
                                   const std::vector<double>& betas,
                                   std::vector<LinearizationPoint>* points = nullptr);

// Checks on smeared and binned densities.
std::vector<RelationReport> check_smeared_shannon(const SmearedAnalysis& s);
std::vector<RelationReport> check_renyi_smeared(const SmearedAnalysis& s, const OrderPair& pair);
std::vector<RelationReport> check_renyi_binned(const SmearedAnalysis& s, const OrderPair& pair,
                                               const BinSpec& bins_zeta, const BinSpec& bins_xi);
std::vector<RelationReport> check_tsallis_binned(const SmearedAnalysis& s, const OrderPair& pair,
                                                 const BinSpec& bins_zeta, const BinSpec& bins_xi);
std::vector<RelationReport> check_s_f(const AcceptanceFn& f, const MinLengthParams& params);

}  // namespace minlen
