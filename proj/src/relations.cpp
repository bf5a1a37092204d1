#include "minlen/relations.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "minlen/error.hpp"
#include "minlen/numerics.hpp"

namespace minlen {

namespace {

const double kLnEPi = 1.0 + std::log(num::kPi);

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ln ||p||_a from the Renyi entropy: ln ||p||_a = (1 - a)/a R_a.
struct LogNorm {
  double value;
  double error;
};

LogNorm log_norm(const DensityFn& d, double a) {
  const EntropyValue r = diff_renyi(d, a);
  const double c = (1.0 - a) / a;
  return {c * r.value, std::abs(c) * r.est_error};
}

double log_norm(const DiscreteDist& p, double a) { return std::log(alpha_norm(p, a)); }

// sum of w_i v_i g(s_i) over the nodes of v, and the same on the refined grid
struct QFunctional {
  double value;
  double error;
};

QFunctional q_functional(const DensityFn& v, const std::function<double(double)>& g) {
  auto on = [&](const Grid& grid, bool refined) {
    const auto s = grid.native_nodes();
    const auto w = grid.native_weights();
    double sum = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double rho = refined ? v.native_value(s[i]) : v.values()[i] * grid.jacobians()[i];
      sum += w[i] * rho * g(s[i]);
    }
    return sum;
  };
  const double coarse = on(v.grid(), false);
  const double fine = on(v.grid().refined(), true);
  return {coarse, std::abs(fine - coarse)};
}

QFunctional correction_of(const DensityFn& v, const MinLengthParams& params) {
  if (!params.deformed()) return {0.0, 0.0};
  const CoordinateMap& map = v.grid().map();
  if (map.kind() != CoordinateMap::Kind::TanhQ)
    throw InvalidParameter("correction term needs a tanh-mapped Q density");
  const CoordinateMap with_beta = CoordinateMap::tanh_k(params.q0, params.beta);
  return q_functional(v, [&](double s) { return with_beta.log_one_plus_beta_k2(s); });
}

std::string pair_digest(const OrderPair& p) {
  return ";alpha=" + fmt(p.alpha) + ";gamma=" + fmt(p.gamma);
}

void require_conjugate(const OrderPair& p) {
  if (p.degenerate()) return;
  make_order_pair(p.alpha, p.gamma);
}

}  // namespace

std::string_view to_string(RelationId id) {
  switch (id) {
    case RelationId::Identity: return "identity";
    case RelationId::Robertson: return "robertson";
    case RelationId::RobertsonVariance: return "robertson_variance";
    case RelationId::JensenCorrection: return "jensen_correction";
    case RelationId::Linearization: return "linearization";
    case RelationId::BbmBase: return "bbm_base";
    case RelationId::BbmCorrected: return "bbm_corrected";
    case RelationId::SmearingMonotoneK: return "smearing_monotone_k";
    case RelationId::SmearingMonotoneX: return "smearing_monotone_x";
    case RelationId::SmearedShannon: return "smeared_shannon";
    case RelationId::SmearedShannonSf: return "smeared_shannon_sf";
    case RelationId::BinningLemmaK: return "binning_lemma_k";
    case RelationId::BinningLemmaX: return "binning_lemma_x";
    case RelationId::BinnedShannon: return "binned_shannon";
    case RelationId::Beckner: return "beckner";
    case RelationId::BecknerTwin: return "beckner_twin";
    case RelationId::RenyiNormUW: return "renyi_norm_uw";
    case RelationId::RenyiNormWU: return "renyi_norm_wu";
    case RelationId::RenyiSmeared: return "renyi_smeared";
    case RelationId::RenyiSmearedTwin: return "renyi_smeared_twin";
    case RelationId::RenyiBinnedNorm: return "renyi_binned_norm";
    case RelationId::RenyiBinnedNormTwin: return "renyi_binned_norm_twin";
    case RelationId::RenyiBinned: return "renyi_binned";
    case RelationId::RenyiBinnedTwin: return "renyi_binned_twin";
    case RelationId::NormOrderingAlpha: return "norm_ordering_alpha";
    case RelationId::NormOrderingGamma: return "norm_ordering_gamma";
    case RelationId::TsallisBinned: return "tsallis_binned";
    case RelationId::TsallisBinnedTwin: return "tsallis_binned_twin";
    case RelationId::SfSubnormalized: return "sf_subnormalized";
    case RelationId::SfGaussianBound: return "sf_gaussian_bound";
  }
  return "?";
}

RelationId parse_relation_id(std::string_view name) {
  for (int i = 0; i <= static_cast<int>(RelationId::SfGaussianBound); ++i) {
    const auto id = static_cast<RelationId>(i);
    if (to_string(id) == name) return id;
  }
  throw InvalidParameter("unknown relation '" + std::string(name) + "'");
}

bool is_equality(RelationId id) { return id == RelationId::Identity; }

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::NotApplicable: return "not_applicable";
  }
  return "?";
}

RelationReport make_report(RelationId id, double lhs, double rhs, double est_error,
                           std::string digest) {
  RelationReport r;
  r.id = id;
  r.lhs = lhs;
  r.rhs = rhs;
  r.margin = lhs - rhs;
  r.est_error = est_error;
  r.inputs_digest = std::move(digest);
  judge(r);
  return r;
}

void judge(RelationReport& r, double margin_floor, double error_factor) {
  if (r.verdict == Verdict::NotApplicable) return;
  r.tolerance = margin_floor + error_factor * r.est_error;
  const bool ok =
      is_equality(r.id) ? std::abs(r.margin) <= r.tolerance : r.margin >= -r.tolerance;
  r.verdict = ok ? Verdict::Pass : Verdict::Fail;
}

RelationReport not_applicable(RelationId id, std::string digest, std::string note) {
  RelationReport r;
  r.id = id;
  r.lhs = r.rhs = r.margin = std::nan("");
  r.tolerance = kMarginFloor;
  r.verdict = Verdict::NotApplicable;
  r.inputs_digest = std::move(digest);
  r.note = std::move(note);
  return r;
}

double kappa(const OrderPair& pair) {
  if (pair.degenerate()) return std::exp(1.0);
  // the alpha -> infinity end of the family
  if (std::isinf(pair.alpha) && pair.gamma == 0.5) return 2.0;
  require_conjugate(pair);
  const double a = pair.alpha, g = pair.gamma;
  // log form keeps alpha close to 1 accurate
  const double l = std::log(a) / (a - 1.0) + std::log(g) / (g - 1.0);
  return std::exp(0.5 * l);
}

OrderPair conjugate_order(double alpha) {
  if (alpha == 1.0) return {};
  if (!(alpha > 1.0) || !std::isfinite(alpha))
    throw InvalidParameter("conjugate orders need alpha > 1");
  return make_order_pair(alpha, alpha / (2.0 * alpha - 1.0));
}

// ---------------------------------------------------------------------------

StateAnalysis::StateAnalysis(const MixedState& state) : bundle_(minlen::bundle(state)) {
  v_ = std::make_shared<const DensityFn>(bundle_.v_q);
  w_ = std::make_shared<const DensityFn>(bundle_.w_x);
  u_ = std::make_shared<const DensityFn>(bundle_.u_k);
  h_q_ = diff_shannon(*v_);
  h_x_ = diff_shannon(*w_);
  h_k_ = diff_shannon(*u_);
  const QFunctional c = correction_of(*v_, params());
  correction_ = c.value;
  correction_error_ = c.error;
}

std::string StateAnalysis::digest() const {
  return "state=" + state().label() + ";beta=" + fmt(params().beta);
}

double correction_term(const MixedState& state) {
  return correction_of(q_density(state), state.params()).value;
}

SmearedAnalysis::SmearedAnalysis(const StateAnalysis& base, AcceptanceFn f, AcceptanceFn g)
    : base_(&base), f_(std::move(f)), g_(std::move(g)) {
  m_ = std::make_shared<const DensityFn>(smear(*base.u(), f_));
  n_ = std::make_shared<const DensityFn>(smear(*base.w(), g_));
  h_m_ = diff_shannon(*m_);
  h_n_ = diff_shannon(*n_);
  s_f_ = minlen::s_f(f_, base.params());
}

std::string SmearedAnalysis::digest() const {
  return base_->digest() + ";sigma_f=" + fmt(f_.sigma()) + ";sigma_g=" + fmt(g_.sigma());
}

double BinSpec::delta() const {
  if (edges.empty()) return width;
  double d = 0.0;
  for (std::size_t i = 1; i < edges.size(); ++i) d = std::max(d, edges[i] - edges[i - 1]);
  return d;
}

DiscreteDist BinSpec::apply(std::shared_ptr<const DensityFn> density) const {
  if (edges.empty()) return bin_density_lattice(std::move(density), width, origin);
  return bin_density(*density, edges);
}

std::string BinSpec::digest() const {
  if (edges.empty()) return "lattice(" + fmt(width) + "@" + fmt(origin) + ")";
  return "edges(" + std::to_string(edges.size() - 1) + " bins,max " + fmt(delta()) + ")";
}

// ---------------------------------------------------------------------------

RelationReport check_identity(const StateAnalysis& s) {
  const double err = s.h_k().est_error + s.h_q().est_error + s.correction_error();
  return make_report(RelationId::Identity, s.h_k().value, s.h_q().value + s.correction(), err,
                     s.digest());
}

std::vector<RelationReport> check_robertson(const StateAnalysis& s) {
  const std::string d = s.digest();
  MomentValue x1{}, x2{}, k1{}, k2{};
  try {
    x1 = moment(*s.w(), 1);
    x2 = moment(*s.w(), 2);
  } catch (const MomentDivergence&) {
    return {not_applicable(RelationId::Robertson, d, "position variance diverges"),
            not_applicable(RelationId::RobertsonVariance, d, "position variance diverges")};
  }
  try {
    k1 = moment(*s.u(), 1);
    k2 = moment(*s.u(), 2);
  } catch (const MomentDivergence&) {
    return {not_applicable(RelationId::Robertson, d, "wavenumber variance diverges"),
            not_applicable(RelationId::RobertsonVariance, d, "wavenumber variance diverges")};
  }
  const double beta = s.params().beta;
  const double var_x = x2.value - x1.value * x1.value;
  const double var_k = k2.value - k1.value * k1.value;
  const double lhs = std::sqrt(var_x * var_k);
  const double rhs = 0.5 * (1.0 + beta * k2.value);
  const double err_var_x = x2.est_error + 2.0 * std::abs(x1.value) * x1.est_error;
  const double err_var_k = k2.est_error + 2.0 * std::abs(k1.value) * k1.est_error;
  const double err = 0.5 * lhs * (err_var_x / var_x + err_var_k / var_k) + 0.5 * beta * k2.est_error;
  return {make_report(RelationId::Robertson, lhs, rhs, err, d),
          make_report(RelationId::RobertsonVariance, rhs, 0.5 * (1.0 + beta * var_k),
                      beta * err_var_k, d)};
}

RelationReport check_jensen(const StateAnalysis& s) {
  MomentValue k2{};
  try {
    k2 = moment(*s.u(), 2);
  } catch (const MomentDivergence&) {
    return not_applicable(RelationId::JensenCorrection, s.digest(), "<k^2> diverges");
  }
  const double beta = s.params().beta;
  const double lhs = std::log1p(beta * k2.value);
  const double err = beta * k2.est_error / (1.0 + beta * k2.value) + s.correction_error();
  return make_report(RelationId::JensenCorrection, lhs, s.correction(), err, s.digest());
}

std::vector<RelationReport> check_bbm(const StateAnalysis& s) {
  const double err_qx = s.h_q().est_error + s.h_x().est_error;
  const double err_kx = s.h_k().est_error + s.h_x().est_error + s.correction_error();
  return {make_report(RelationId::BbmBase, s.h_q().value + s.h_x().value, kLnEPi, err_qx, s.digest()),
          make_report(RelationId::BbmCorrected, s.h_k().value + s.h_x().value,
                      kLnEPi + s.correction(), err_kx, s.digest())};
}

std::vector<RelationReport> check_binned_shannon(const StateAnalysis& s, const BinSpec& bins_k,
                                                 const BinSpec& bins_x) {
  const std::string d = s.digest() + ";bins_k=" + bins_k.digest() + ";bins_x=" + bins_x.digest();
  const DiscreteDist pk = bins_k.apply(s.u());
  const DiscreteDist px = bins_x.apply(s.w());
  const double hk = discrete_renyi(pk, 1.0).value;
  const double hx = discrete_renyi(px, 1.0).value;
  const double dk = bins_k.delta(), dx = bins_x.delta();
  return {
      make_report(RelationId::BinningLemmaK, hk, s.h_k().value - std::log(dk), s.h_k().est_error, d),
      make_report(RelationId::BinningLemmaX, hx, s.h_x().value - std::log(dx), s.h_x().est_error, d),
      make_report(RelationId::BinnedShannon, hk + hx, kLnEPi - std::log(dk * dx) + s.correction(),
                  s.correction_error(), d)};
}

std::vector<RelationReport> check_beckner(const StateAnalysis& s, const OrderPair& pair) {
  if (pair.degenerate()) return {check_bbm(s).front()};
  require_conjugate(pair);
  const std::string d = s.digest() + pair_digest(pair);
  const double c = (1.0 - pair.gamma) / pair.gamma;
  const double shift = c * std::log(kappa(pair) * num::kPi);
  std::vector<RelationReport> out;
  auto one = [&](RelationId id, const DensityFn& big, const DensityFn& small) {
    try {
      const LogNorm a = log_norm(small, pair.alpha);
      const LogNorm g = log_norm(big, pair.gamma);
      out.push_back(make_report(id, g.value - shift, a.value, a.error + g.error, d));
    } catch (const DivergenceError&) {
      out.push_back(not_applicable(id, d, "norm diverges"));
    }
  };
  one(RelationId::Beckner, *s.w(), *s.v());
  one(RelationId::BecknerTwin, *s.v(), *s.w());
  return out;
}

RelationReport check_linearization(
    const std::function<MixedState(const MinLengthParams&)>& make_state,
    const std::vector<double>& betas, std::vector<LinearizationPoint>* points) {
  if (betas.empty()) throw InvalidParameter("linearization needs at least one beta");
  std::vector<LinearizationPoint> pts;
  std::string label;
  for (double beta : betas) {
    const MinLengthParams p = make_params(beta);
    const MixedState state = make_state(p);
    if (label.empty()) label = state.label();
    const RepresentationBundle b = bundle(state);
    MomentValue k2{}, k4{};
    try {
      k2 = moment(b.u_k, 2);
      k4 = moment(b.u_k, 4);
    } catch (const MomentDivergence&) {
      return not_applicable(RelationId::Linearization, "state=" + label + ";beta=" + fmt(beta),
                            "<k^4> diverges");
    }
    const double target = -0.5 * k4.value;
    if (!p.deformed()) {
      pts.push_back({beta, 0.0, target, target});
      continue;
    }
    const double residual = correction_of(b.v_q, p).value - beta * k2.value;
    pts.push_back({beta, residual, residual / (beta * beta), target});
  }
  const auto best = std::min_element(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
    return a.beta < b.beta;
  });
  if (points) *points = pts;
  const double rel = std::abs(best->ratio / best->target - 1.0);
  return make_report(RelationId::Linearization, 0.1, rel, 0.0,
                     "state=" + label + ";beta=" + fmt(best->beta));
}

std::vector<RelationReport> check_smeared_shannon(const SmearedAnalysis& s) {
  const StateAnalysis& b = s.base();
  const std::string d = s.digest();
  const double hm = s.h_m().value, hn = s.h_n().value;
  const double err = s.h_m().est_error + s.h_n().est_error;
  return {
      make_report(RelationId::SmearingMonotoneK, hm, b.h_k().value,
                  s.h_m().est_error + b.h_k().est_error, d),
      make_report(RelationId::SmearingMonotoneX, hn, b.h_x().value,
                  s.h_n().est_error + b.h_x().est_error, d),
      make_report(RelationId::SmearedShannon, hm + hn, kLnEPi + b.correction(),
                  err + b.correction_error(), d),
      make_report(RelationId::SmearedShannonSf, hm + hn, kLnEPi - std::log(s.s_f()), err, d)};
}

std::vector<RelationReport> check_renyi_smeared(const SmearedAnalysis& s, const OrderPair& pair) {
  if (pair.degenerate()) return {check_smeared_shannon(s).back()};
  require_conjugate(pair);
  const std::string d = s.digest() + pair_digest(pair);
  const double c = (1.0 - pair.gamma) / pair.gamma;
  const double kp = kappa(pair) * num::kPi;
  std::vector<RelationReport> out;
  try {
    const LogNorm ua = log_norm(*s.m(), pair.alpha), ug = log_norm(*s.m(), pair.gamma);
    const LogNorm wa = log_norm(*s.n(), pair.alpha), wg = log_norm(*s.n(), pair.gamma);
    const double shift = c * std::log(s.s_f() / kp);
    out.push_back(make_report(RelationId::RenyiNormUW, wg.value + shift, ua.value, wg.error + ua.error, d));
    out.push_back(make_report(RelationId::RenyiNormWU, ug.value + shift, wa.value, ug.error + wa.error, d));
    // R_a = a/(1-a) ln ||.||_a
    auto renyi = [](const LogNorm& n, double a) { return a / (1.0 - a) * n.value; };
    auto renyi_err = [](const LogNorm& n, double a) { return std::abs(a / (1.0 - a)) * n.error; };
    const double bound = std::log(kp / s.s_f());
    const double a = pair.alpha, g = pair.gamma;
    out.push_back(make_report(RelationId::RenyiSmeared, renyi(ua, a) + renyi(wg, g), bound,
                              renyi_err(ua, a) + renyi_err(wg, g), d));
    out.push_back(make_report(RelationId::RenyiSmearedTwin, renyi(ug, g) + renyi(wa, a), bound,
                              renyi_err(ug, g) + renyi_err(wa, a), d));
  } catch (const DivergenceError&) {
    for (RelationId id : {RelationId::RenyiNormUW, RelationId::RenyiNormWU, RelationId::RenyiSmeared,
                          RelationId::RenyiSmearedTwin})
      out.push_back(not_applicable(id, d, "norm diverges"));
  }
  return out;
}

std::vector<RelationReport> check_renyi_binned(const SmearedAnalysis& s, const OrderPair& pair,
                                               const BinSpec& bins_zeta, const BinSpec& bins_xi) {
  require_conjugate(pair);
  const std::string d = s.digest() + pair_digest(pair) + ";bins_zeta=" + bins_zeta.digest() +
                        ";bins_xi=" + bins_xi.digest();
  const DiscreteDist pm = bins_zeta.apply(s.m());
  const DiscreteDist pn = bins_xi.apply(s.n());
  const double cells = s.s_f() * bins_zeta.delta() * bins_xi.delta();
  const double kp = kappa(pair) * num::kPi;
  const double a = pair.alpha, g = pair.gamma;
  std::vector<RelationReport> out;
  if (!pair.degenerate()) {
    const double c = (1.0 - g) / g;
    const double shift = c * std::log(cells / kp);
    out.push_back(make_report(RelationId::RenyiBinnedNorm, log_norm(pn, g) + shift, log_norm(pm, a), 0.0, d));
    out.push_back(make_report(RelationId::RenyiBinnedNormTwin, log_norm(pm, g) + shift, log_norm(pn, a), 0.0, d));
  }
  const double bound = std::log(kp / cells);
  out.push_back(make_report(RelationId::RenyiBinned,
                            discrete_renyi(pm, a).value + discrete_renyi(pn, g).value, bound, 0.0, d));
  if (!pair.degenerate())
    out.push_back(make_report(RelationId::RenyiBinnedTwin,
                              discrete_renyi(pm, g).value + discrete_renyi(pn, a).value, bound, 0.0, d));
  return out;
}

std::vector<RelationReport> check_tsallis_binned(const SmearedAnalysis& s, const OrderPair& pair,
                                                 const BinSpec& bins_zeta, const BinSpec& bins_xi) {
  require_conjugate(pair);
  const std::string d = s.digest() + pair_digest(pair) + ";bins_zeta=" + bins_zeta.digest() +
                        ";bins_xi=" + bins_xi.digest();
  const DiscreteDist pm = bins_zeta.apply(s.m());
  const DiscreteDist pn = bins_xi.apply(s.n());
  const double a = pair.alpha, g = pair.gamma;
  const double arg = kappa(pair) * num::kPi / (s.s_f() * bins_zeta.delta() * bins_xi.delta());
  const double bound = alpha_log(arg, pair.nu());
  std::vector<RelationReport> out;
  out.push_back(make_report(RelationId::TsallisBinned,
                            discrete_tsallis(pm, a).value + discrete_tsallis(pn, g).value, bound, 0.0, d));
  if (!pair.degenerate()) {
    out.push_back(make_report(RelationId::TsallisBinnedTwin,
                              discrete_tsallis(pm, g).value + discrete_tsallis(pn, a).value, bound, 0.0, d));
    for (const auto& [p, axis] : {std::pair{&pm, "zeta"}, std::pair{&pn, "xi"}}) {
      const std::string da = d + ";axis=" + axis;
      out.push_back(make_report(RelationId::NormOrderingAlpha, 1.0, alpha_norm(*p, a), 0.0, da));
      out.push_back(make_report(RelationId::NormOrderingGamma, alpha_norm(*p, g), 1.0, 0.0, da));
    }
  }
  return out;
}

std::vector<RelationReport> check_s_f(const AcceptanceFn& f, const MinLengthParams& params) {
  const std::string d = "beta=" + fmt(params.beta) + ";sigma_f=" + fmt(f.sigma());
  const double sf = s_f(f, params);
  std::vector<RelationReport> out{make_report(RelationId::SfSubnormalized, 1.0, sf, 0.0, d)};
  if (f.profile() == AcceptanceFn::Profile::Gaussian && params.deformed())
    out.push_back(make_report(RelationId::SfGaussianBound,
                              s_f_gaussian_bound(f.sigma(), params.beta), sf, 0.0, d));
  return out;
}

}  // namespace minlen
