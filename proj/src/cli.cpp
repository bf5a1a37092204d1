#include "minlen/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "minlen/error.hpp"

namespace minlen::cli {

using nlohmann::json;

std::vector<StateSelector> default_states() {
  std::vector<StateSelector> out;
  for (CatalogName n : all_catalog_names()) {
    StateSelector s{n, {}, std::nullopt};
    if (n == CatalogName::RandomFourierQ) s.seed = 1;
    out.push_back(s);
  }
  return out;
}

namespace {

std::vector<double> number_list(const json& j, const char* key) {
  if (!j.is_array()) throw ConfigError(std::string(key) + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& x : j) {
    if (!x.is_number()) throw ConfigError(std::string(key) + " must be an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

double number_field(const json& j, const char* key) {
  if (!j.is_number()) throw ConfigError(std::string(key) + " must be a number");
  return j.get<double>();
}

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed, const char* where) {
  if (!obj.is_object()) throw ConfigError(std::string(where) + " must be an object");
  for (const auto& [k, v] : obj.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return k == a; }))
      throw ConfigError("unknown key '" + k + "' in " + where);
  }
}

StateSelector parse_state(const json& j) {
  reject_unknown(j, {"name", "shape", "seed"}, "state");
  if (!j.contains("name") || !j["name"].is_string()) throw ConfigError("state needs a name");
  StateSelector s;
  try {
    s.name = parse_catalog_name(j["name"].get<std::string>());
  } catch (const InvalidParameter& e) {
    throw ConfigError(e.what());
  }
  if (j.contains("shape")) s.shape = number_list(j["shape"], "shape");
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) throw ConfigError("seed must be a nonnegative integer");
    s.seed = j["seed"].get<std::uint64_t>();
  }
  return s;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  reject_unknown(j,
                 {"beta_grid", "sigma_grid", "alpha_grid", "states", "bins", "tolerances",
                  "linearization", "perturbations", "output_path", "format"},
                 "config");
  RunConfig c;
  c.states = default_states();
  if (j.contains("beta_grid")) c.beta_grid = number_list(j["beta_grid"], "beta_grid");
  if (j.contains("sigma_grid")) c.sigma_grid = number_list(j["sigma_grid"], "sigma_grid");
  if (j.contains("alpha_grid")) c.alpha_grid = number_list(j["alpha_grid"], "alpha_grid");
  if (j.contains("states")) {
    if (!j["states"].is_array()) throw ConfigError("states must be an array");
    c.states.clear();
    for (const auto& s : j["states"]) c.states.push_back(parse_state(s));
  }
  if (j.contains("bins")) {
    if (!j["bins"].is_array()) throw ConfigError("bins must be an array");
    c.bins.clear();
    for (const auto& b : j["bins"]) {
      reject_unknown(b, {"delta_k", "delta_x", "origin"}, "bins");
      BinChoice bc;
      if (b.contains("delta_k")) bc.delta_k = number_field(b["delta_k"], "delta_k");
      if (b.contains("delta_x")) bc.delta_x = number_field(b["delta_x"], "delta_x");
      if (b.contains("origin")) bc.origin = number_field(b["origin"], "origin");
      c.bins.push_back(bc);
    }
  }
  if (j.contains("tolerances")) {
    const json& t = j["tolerances"];
    reject_unknown(t, {"margin_floor", "error_factor"}, "tolerances");
    if (t.contains("margin_floor")) c.margin_floor = number_field(t["margin_floor"], "margin_floor");
    if (t.contains("error_factor")) c.error_factor = number_field(t["error_factor"], "error_factor");
  }
  if (j.contains("linearization")) {
    const json& l = j["linearization"];
    reject_unknown(l, {"width", "betas"}, "linearization");
    if (l.contains("width")) c.linearization_width = number_field(l["width"], "width");
    if (l.contains("betas")) c.linearization_betas = number_list(l["betas"], "betas");
  }
  if (j.contains("perturbations")) {
    if (!j["perturbations"].is_array()) throw ConfigError("perturbations must be an array");
    for (const auto& p : j["perturbations"]) {
      reject_unknown(p, {"relation", "lhs_shift"}, "perturbations");
      if (!p.contains("relation") || !p["relation"].is_string())
        throw ConfigError("perturbation needs a relation name");
      Perturbation pt;
      try {
        pt.relation = parse_relation_id(p["relation"].get<std::string>());
      } catch (const InvalidParameter& e) {
        throw ConfigError(e.what());
      }
      if (p.contains("lhs_shift")) pt.lhs_shift = number_field(p["lhs_shift"], "lhs_shift");
      c.perturbations.push_back(pt);
    }
  }
  if (j.contains("output_path")) {
    if (!j["output_path"].is_string()) throw ConfigError("output_path must be a string");
    c.output_path = j["output_path"].get<std::string>();
  }
  if (j.contains("format")) {
    const std::string f = j["format"].is_string() ? j["format"].get<std::string>() : "";
    if (f == "json") c.format = Format::Json;
    else if (f == "csv") c.format = Format::Csv;
    else throw ConfigError("format must be \"json\" or \"csv\"");
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void validate(const RunConfig& c) {
  auto all = [](const std::vector<double>& v, auto pred) { return std::all_of(v.begin(), v.end(), pred); };
  if (c.beta_grid.empty()) throw ConfigError("beta_grid is empty");
  if (c.sigma_grid.empty()) throw ConfigError("sigma_grid is empty");
  if (c.alpha_grid.empty()) throw ConfigError("alpha_grid is empty");
  if (c.states.empty()) throw ConfigError("no states selected");
  if (c.bins.empty()) throw ConfigError("no bins given");
  if (!all(c.beta_grid, [](double b) { return b >= 0.0 && std::isfinite(b); }))
    throw ConfigError("beta values must be finite and >= 0");
  if (!all(c.sigma_grid, [](double s) { return s > 0.0 && std::isfinite(s); }))
    throw ConfigError("sigma values must be finite and > 0");
  if (!all(c.alpha_grid, [](double a) { return a >= 1.0 && std::isfinite(a); }))
    throw ConfigError("alpha values must be finite and >= 1");
  for (const BinChoice& b : c.bins) {
    if (!(b.delta_k > 0.0) || !(b.delta_x > 0.0) || !std::isfinite(b.delta_k) ||
        !std::isfinite(b.delta_x) || !std::isfinite(b.origin))
      throw ConfigError("bin widths must be finite and > 0");
  }
  for (const StateSelector& s : c.states) {
    if (s.name == CatalogName::RandomFourierQ && !s.seed)
      throw ConfigError("random_fourier_q needs a seed");
  }
  // zero is allowed: it turns every margin into an exact comparison
  if (!(c.margin_floor >= 0.0) || !(c.error_factor >= 0.0) || !std::isfinite(c.margin_floor) ||
      !std::isfinite(c.error_factor))
    throw ConfigError("tolerances must be finite and >= 0");
  if (!(c.linearization_width >= 0.0)) throw ConfigError("linearization width must be >= 0");
  if (c.linearization_width > 0.0 &&
      (c.linearization_betas.empty() ||
       !all(c.linearization_betas, [](double b) { return b > 0.0 && std::isfinite(b); })))
    throw ConfigError("linearization betas must be nonempty and > 0");
}

// ---------------------------------------------------------------------------

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string selector_digest(const StateSelector& s) {
  std::string d(to_string(s.name));
  for (double x : s.shape) d += ":" + fmt(x);
  if (s.seed) d += "#" + std::to_string(*s.seed);
  return d;
}

/// Runs a check; divergent inputs become not_applicable, other library errors
/// a failing record that carries the message.
std::vector<RelationReport> guarded(RelationId id, const std::string& digest,
                                    const std::function<std::vector<RelationReport>()>& fn) {
  try {
    return fn();
  } catch (const DivergenceError& e) {
    return {not_applicable(id, digest, e.what())};
  } catch (const Error& e) {
    RelationReport r = not_applicable(id, digest, e.what());
    r.verdict = Verdict::Fail;
    return {r};
  }
}

std::vector<RelationReport> one(RelationReport r) { return {std::move(r)}; }

struct StateJob {
  const StateSelector* selector;
  double beta;
};

std::vector<Record> run_state(const RunConfig& c, const StateJob& job) {
  std::vector<Record> out;
  const MinLengthParams params = make_params(job.beta);
  Record base;
  base.beta = job.beta;
  base.state = selector_digest(*job.selector);
  auto add = [&](const std::vector<RelationReport>& reports, const Record& proto) {
    for (const RelationReport& r : reports) {
      Record rec = proto;
      rec.report = r;
      out.push_back(std::move(rec));
    }
  };

  PureState pure;
  try {
    pure = catalog_state(job.selector->name, params, job.selector->shape, job.selector->seed);
  } catch (const InvalidParameter& e) {
    add({not_applicable(RelationId::Identity, "state=" + base.state + ";beta=" + fmt(job.beta),
                        e.what())},
        base);
    return out;
  }
  const StateAnalysis a(MixedState::pure(std::move(pure)));
  base.state = a.state().label();
  base.correction = a.correction();
  const std::string d = a.digest();

  add(guarded(RelationId::Identity, d, [&] { return one(check_identity(a)); }), base);
  add(guarded(RelationId::Robertson, d, [&] { return check_robertson(a); }), base);
  add(guarded(RelationId::JensenCorrection, d, [&] { return one(check_jensen(a)); }), base);
  add(guarded(RelationId::BbmBase, d, [&] { return check_bbm(a); }), base);
  for (const BinChoice& b : c.bins) {
    Record proto = base;
    proto.delta_k = b.delta_k;
    proto.delta_x = b.delta_x;
    const BinSpec bk{b.delta_k, b.origin, {}}, bx{b.delta_x, b.origin, {}};
    add(guarded(RelationId::BinnedShannon, d + ";bins_k=" + bk.digest() + ";bins_x=" + bx.digest(),
                [&] { return check_binned_shannon(a, bk, bx); }),
        proto);
  }
  for (double alpha : c.alpha_grid) {
    const OrderPair pair = conjugate_order(alpha);
    Record proto = base;
    proto.alpha = pair.alpha;
    proto.gamma = pair.gamma;
    add(guarded(RelationId::Beckner, d + ";alpha=" + fmt(alpha),
                [&] { return check_beckner(a, pair); }),
        proto);
  }

  for (double sigma : c.sigma_grid) {
    const SmearedAnalysis s(a, gaussian_acceptance(sigma), gaussian_acceptance(sigma));
    Record sb = base;
    sb.sigma = sigma;
    sb.s_f = s.s_f();
    if (params.deformed()) sb.s_f_bound = s_f_gaussian_bound(sigma, job.beta);
    const std::string sd = s.digest();
    add(guarded(RelationId::SmearedShannon, sd, [&] { return check_smeared_shannon(s); }), sb);
    for (double alpha : c.alpha_grid) {
      const OrderPair pair = conjugate_order(alpha);
      Record proto = sb;
      proto.alpha = pair.alpha;
      proto.gamma = pair.gamma;
      add(guarded(RelationId::RenyiSmeared, sd + ";alpha=" + fmt(alpha),
                  [&] { return check_renyi_smeared(s, pair); }),
          proto);
      for (const BinChoice& b : c.bins) {
        Record bp = proto;
        bp.delta_k = b.delta_k;
        bp.delta_x = b.delta_x;
        const BinSpec bz{b.delta_k, b.origin, {}}, bxi{b.delta_x, b.origin, {}};
        const std::string bd =
            sd + ";alpha=" + fmt(alpha) + ";bins_zeta=" + bz.digest() + ";bins_xi=" + bxi.digest();
        add(guarded(RelationId::RenyiBinned, bd,
                    [&] { return check_renyi_binned(s, pair, bz, bxi); }),
            bp);
        add(guarded(RelationId::TsallisBinned, bd,
                    [&] { return check_tsallis_binned(s, pair, bz, bxi); }),
            bp);
      }
    }
  }
  return out;
}

std::vector<Record> run_sf(double beta, double sigma) {
  const MinLengthParams params = make_params(beta);
  Record proto;
  proto.state = "";
  proto.beta = beta;
  proto.sigma = sigma;
  const AcceptanceFn f = gaussian_acceptance(sigma);
  std::vector<Record> out;
  for (const RelationReport& r :
       guarded(RelationId::SfSubnormalized, "beta=" + fmt(beta) + ";sigma_f=" + fmt(sigma),
               [&] { return check_s_f(f, params); })) {
    Record rec = proto;
    rec.report = r;
    rec.s_f = r.rhs;
    if (params.deformed()) rec.s_f_bound = s_f_gaussian_bound(sigma, beta);
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<Record> run_linearization(const RunConfig& c) {
  const double width = c.linearization_width;
  std::vector<LinearizationPoint> pts;
  const auto reports = guarded(RelationId::Linearization, "linearization", [&] {
    return one(check_linearization(
        [width](const MinLengthParams& p) {
          return MixedState::pure(catalog_state(CatalogName::TruncatedGaussianQ, p, {width}));
        },
        c.linearization_betas, &pts));
  });
  Record rec;
  rec.report = reports.front();
  rec.state = "truncated_gaussian_q(s=" + fmt(width) + ")";
  rec.beta = *std::min_element(c.linearization_betas.begin(), c.linearization_betas.end());
  return {rec};
}

}  // namespace

std::vector<Record> run_verify(const RunConfig& c) {
  validate(c);
  // one task per state x beta, per beta x sigma for S_f, plus the expansion check
  std::vector<std::function<std::vector<Record>()>> tasks;
  for (const StateSelector& s : c.states) {
    for (double beta : c.beta_grid) {
      const StateJob job{&s, beta};
      tasks.push_back([&c, job] { return run_state(c, job); });
    }
  }
  for (double beta : c.beta_grid)
    for (double sigma : c.sigma_grid) tasks.push_back([beta, sigma] { return run_sf(beta, sigma); });
  if (c.linearization_width > 0.0) tasks.push_back([&c] { return run_linearization(c); });

  std::vector<std::vector<Record>> results(tasks.size());
  std::vector<std::exception_ptr> errors(tasks.size());
  const long n = static_cast<long>(tasks.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n; ++i) {
    try {
      results[i] = tasks[i]();
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::vector<Record> out;
  for (auto& r : results) std::move(r.begin(), r.end(), std::back_inserter(out));
  for (Record& r : out) {
    for (const Perturbation& p : c.perturbations) {
      if (r.report.id != p.relation || r.report.verdict == Verdict::NotApplicable) continue;
      r.report.lhs += p.lhs_shift;
      r.report.margin = r.report.lhs - r.report.rhs;
    }
    // library errors already carry a fail verdict and keep it
    if (std::isfinite(r.report.margin)) judge(r.report, c.margin_floor, c.error_factor);
  }
  std::stable_sort(out.begin(), out.end(), [](const Record& x, const Record& y) {
    if (x.report.inputs_digest != y.report.inputs_digest)
      return x.report.inputs_digest < y.report.inputs_digest;
    return to_string(x.report.id) < to_string(y.report.id);
  });
  return out;
}

std::vector<Record> run_sweep(const RunConfig& c, const std::string& param) {
  validate(c);
  std::vector<double> values;
  if (param == "beta") values = c.beta_grid;
  else if (param == "sigma") values = c.sigma_grid;
  else if (param == "alpha") values = c.alpha_grid;
  else throw ConfigError("sweep parameter must be beta, sigma or alpha");
  std::vector<Record> out;
  for (double v : values) {
    RunConfig one_point = c;
    one_point.beta_grid = {param == "beta" ? v : c.beta_grid.front()};
    one_point.sigma_grid = {param == "sigma" ? v : c.sigma_grid.front()};
    one_point.alpha_grid = {param == "alpha" ? v : c.alpha_grid.front()};
    one_point.bins = {c.bins.front()};
    one_point.linearization_width = 0.0;
    for (Record& r : run_verify(one_point)) {
      r.param = param;
      r.param_value = v;
      out.push_back(std::move(r));
    }
  }
  return out;
}

bool any_failure(const std::vector<Record>& records) {
  return std::any_of(records.begin(), records.end(),
                     [](const Record& r) { return r.report.verdict == Verdict::Fail; });
}

// ---------------------------------------------------------------------------

std::string number(double v, Format format) {
  if (!std::isfinite(v)) return format == Format::Json ? "null" : "";
  return fmt(v);
}

namespace {

std::string json_string(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    switch (ch) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(ch) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", ch);
          out += buf;
        } else {
          out += ch;
        }
    }
  }
  return out + "\"";
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) out += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return out + "\"";
}

// Ordered (key, rendered value) pairs; keeps the JSON key order fixed.
using Fields = std::vector<std::pair<std::string, std::string>>;

Fields record_fields(const Record& r, Format f, bool sweep) {
  Fields out;
  auto text = [f](const std::string& s) { return f == Format::Json ? json_string(s) : csv_field(s); };
  if (sweep) {
    out.emplace_back("param", text(r.param));
    out.emplace_back("value", number(r.param_value, f));
  }
  out.emplace_back("relation_id", text(std::string(to_string(r.report.id))));
  out.emplace_back("state", text(r.state));
  out.emplace_back("beta", number(r.beta, f));
  out.emplace_back("sigma", number(r.sigma, f));
  out.emplace_back("alpha", number(r.alpha, f));
  out.emplace_back("gamma", number(r.gamma, f));
  out.emplace_back("delta_k", number(r.delta_k, f));
  out.emplace_back("delta_x", number(r.delta_x, f));
  out.emplace_back("lhs", number(r.report.lhs, f));
  out.emplace_back("rhs", number(r.report.rhs, f));
  out.emplace_back("margin", number(r.report.margin, f));
  out.emplace_back("est_error", number(r.report.est_error, f));
  out.emplace_back("verdict", text(std::string(to_string(r.report.verdict))));
  if (sweep) {
    out.emplace_back("correction_term", number(r.correction, f));
    out.emplace_back("s_f", number(r.s_f, f));
    out.emplace_back("s_f_bound", number(r.s_f_bound, f));
  }
  if (f == Format::Json) {
    out.emplace_back("tolerance", number(r.report.tolerance, f));
    out.emplace_back("inputs_digest", text(r.report.inputs_digest));
    out.emplace_back("note", text(r.report.note));
  }
  return out;
}

void write_records(std::ostream& os, const std::vector<Record>& records, Format f, bool sweep) {
  if (f == Format::Csv) {
    bool first = true;
    for (const auto& [k, v] : record_fields(Record{}, f, sweep)) {
      os << (first ? "" : ",") << k;
      first = false;
    }
    os << "\n";
    for (const Record& r : records) {
      first = true;
      for (const auto& [k, v] : record_fields(r, f, sweep)) {
        os << (first ? "" : ",") << v;
        first = false;
      }
      os << "\n";
    }
    return;
  }
  std::map<std::string, int> counts{{"fail", 0}, {"not_applicable", 0}, {"pass", 0}};
  os << "{\n  \"records\": [";
  for (std::size_t i = 0; i < records.size(); ++i) {
    os << (i ? ",\n    {" : "\n    {");
    bool first = true;
    for (const auto& [k, v] : record_fields(records[i], f, sweep)) {
      os << (first ? "" : ", ") << json_string(k) << ": " << v;
      first = false;
    }
    os << "}";
    ++counts[std::string(to_string(records[i].report.verdict))];
  }
  os << "\n  ],\n  \"summary\": {";
  bool first = true;
  for (const auto& [k, v] : counts) {
    os << (first ? "" : ", ") << json_string(k) << ": " << v;
    first = false;
  }
  os << "}\n}\n";
}

}  // namespace

void write_verify(std::ostream& os, const std::vector<Record>& records, Format format) {
  write_records(os, records, format, false);
}

void write_sweep(std::ostream& os, const std::vector<Record>& records, Format format) {
  write_records(os, records, format, true);
}

void write_state(std::ostream& os, const StateSelector& sel, double beta, Format f) {
  const MinLengthParams params = make_params(beta);
  const StateAnalysis a(MixedState::pure(catalog_state(sel.name, params, sel.shape, sel.seed)));
  const std::vector<std::pair<const char*, const DensityFn*>> tables = {
      {"v", a.v().get()}, {"w", a.w().get()}, {"u", a.u().get()}};
  const std::vector<std::pair<const char*, double>> scalars = {
      {"h_q", a.h_q().value},       {"h_x", a.h_x().value},   {"h_k", a.h_k().value},
      {"correction_term", a.correction()}, {"mass_v", a.v()->mass()},
      {"mass_w", a.w()->mass()},   {"mass_u", a.u()->mass()}};
  if (f == Format::Csv) {
    os << "quantity,t,value\n";
    for (const auto& [name, value] : scalars) os << name << ",," << number(value, f) << "\n";
    for (const auto& [name, d] : tables) {
      const auto nodes = d->grid().nodes();
      const auto values = d->values();
      for (std::size_t i = 0; i < nodes.size(); ++i)
        os << name << "," << number(nodes[i], f) << "," << number(values[i], f) << "\n";
    }
    return;
  }
  os << "{\n  \"state\": " << json_string(a.state().label()) << ",\n  \"beta\": " << number(beta, f)
     << ",\n  \"q0\": " << number(params.q0, f);
  for (const auto& [name, value] : scalars) os << ",\n  " << json_string(name) << ": " << number(value, f);
  for (const auto& [name, d] : tables) {
    const auto nodes = d->grid().nodes();
    const auto values = d->values();
    os << ",\n  " << json_string(name) << ": {\"t\": [";
    for (std::size_t i = 0; i < nodes.size(); ++i) os << (i ? ", " : "") << number(nodes[i], f);
    os << "], \"density\": [";
    for (std::size_t i = 0; i < values.size(); ++i) os << (i ? ", " : "") << number(values[i], f);
    os << "]}";
  }
  os << "\n}\n";
}

}  // namespace minlen::cli
