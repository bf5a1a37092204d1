#include <cmath>
#include <set>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "minlen/cli.hpp"

using namespace minlen;
using namespace minlen::cli;

namespace {

RunConfig tiny() {
  RunConfig c;
  c.beta_grid = {1.0};
  c.sigma_grid = {1.0};
  c.alpha_grid = {2.0};
  c.states = {StateSelector{CatalogName::UniformQ, {}, std::nullopt}};
  c.linearization_width = 0.0;
  return c;
}

}  // namespace

TEST_CASE("config parsing") {
  const RunConfig c = parse_config(R"({
    "beta_grid": [0.5], "sigma_grid": [2], "alpha_grid": [1.5, 3],
    "states": [{"name": "random_fourier_q", "seed": 9, "shape": [4]}],
    "bins": [{"delta_k": 0.25, "delta_x": 1, "origin": 0.1}],
    "tolerances": {"margin_floor": 0, "error_factor": 2},
    "perturbations": [{"relation": "beckner_twin", "lhs_shift": 1}],
    "output_path": "r.csv", "format": "csv"})");
  CHECK(c.beta_grid == std::vector<double>{0.5});
  CHECK(c.alpha_grid.size() == 2);
  REQUIRE(c.states.size() == 1);
  CHECK(c.states[0].name == CatalogName::RandomFourierQ);
  CHECK(*c.states[0].seed == 9);
  CHECK(c.states[0].shape == std::vector<double>{4.0});
  CHECK(c.bins[0].delta_k == 0.25);
  CHECK(c.bins[0].origin == 0.1);
  CHECK(c.margin_floor == 0.0);
  CHECK(c.error_factor == 2.0);
  CHECK(c.perturbations[0].relation == RelationId::BecknerTwin);
  CHECK(c.format == Format::Csv);
  CHECK(c.output_path == "r.csv");
  validate(c);

  const RunConfig d = parse_config("{}");
  CHECK(d.states.size() == all_catalog_names().size());
  CHECK(d.format == Format::Json);
  validate(d);
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
  CHECK_THROWS_AS(parse_config("{"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"beta": [1]})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"beta_grid": [1, "x"]})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"states": [{"name": "nope"}]})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"perturbations": [{"relation": "nope"}]})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"format": "xml"})"), ConfigError);
  CHECK_THROWS_AS(validate(parse_config(R"({"beta_grid": []})")), ConfigError);
  CHECK_THROWS_AS(validate(parse_config(R"({"sigma_grid": [0]})")), ConfigError);
  CHECK_THROWS_AS(validate(parse_config(R"({"alpha_grid": [0.7]})")), ConfigError);
  CHECK_THROWS_AS(validate(parse_config(R"({"tolerances": {"margin_floor": -1}})")), ConfigError);
  CHECK_THROWS_AS(validate(parse_config(R"({"states": [{"name": "random_fourier_q"}]})")),
                  ConfigError);
  CHECK_THROWS_AS(run_sweep(tiny(), "gamma"), ConfigError);
}

TEST_CASE("relation names round trip") {
  for (int i = 0; i <= static_cast<int>(RelationId::SfGaussianBound); ++i) {
    const auto id = static_cast<RelationId>(i);
    CHECK(parse_relation_id(to_string(id)) == id);
  }
  CHECK_THROWS_AS(parse_relation_id("bbm"), InvalidParameter);
}

TEST_CASE("verify records, perturbation and output") {
  RunConfig c = tiny();
  const auto records = run_verify(c);
  CHECK_FALSE(any_failure(records));
  std::set<RelationId> seen;
  for (std::size_t i = 0; i < records.size(); ++i) {
    seen.insert(records[i].report.id);
    if (i > 0) CHECK(records[i - 1].report.inputs_digest <= records[i].report.inputs_digest);
  }
  for (RelationId id : {RelationId::Identity, RelationId::BbmCorrected, RelationId::BinnedShannon,
                        RelationId::Beckner, RelationId::SmearedShannonSf, RelationId::RenyiBinned,
                        RelationId::TsallisBinned, RelationId::SfGaussianBound})
    CHECK(seen.count(id) == 1);

  std::ostringstream json_out, csv_out;
  write_verify(json_out, records, Format::Json);
  write_verify(csv_out, records, Format::Csv);
  const auto j = nlohmann::json::parse(json_out.str());
  CHECK(j["records"].size() == records.size());
  CHECK(j["summary"]["fail"] == 0);
  const std::string csv = csv_out.str();
  CHECK(csv.rfind("relation_id,state,beta,sigma,alpha,gamma,delta_k,delta_x,lhs,rhs,margin,"
                  "est_error,verdict\n",
                  0) == 0);
  CHECK(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')) == records.size() + 1);

  c.perturbations = {{RelationId::BbmCorrected, -10.0}};
  const auto bad = run_verify(c);
  CHECK(any_failure(bad));
  for (const Record& r : bad) {
    if (r.report.verdict == Verdict::Fail) CHECK(r.report.id == RelationId::BbmCorrected);
  }
}

TEST_CASE("number formatting") {
  CHECK(number(0.1, Format::Json) == "0.10000000000000001");
  CHECK(number(std::nan(""), Format::Json) == "null");
  CHECK(number(INFINITY, Format::Csv) == "");
}

TEST_CASE("beta sweep keeps the uniform correction at 2 ln 2") {
  RunConfig c = tiny();
  c.beta_grid = {0.01, 1.0, 10.0};
  const auto records = run_sweep(c, "beta");
  int seen = 0;
  for (const Record& r : records) {
    CHECK(r.param == "beta");
    if (!std::isfinite(r.correction)) continue;
    CHECK(std::abs(r.correction - 2.0 * std::log(2.0)) < 1e-10);
    ++seen;
  }
  CHECK(seen > 0);
}

TEST_CASE("show-state tables") {
  std::ostringstream os;
  write_state(os, StateSelector{CatalogName::UniformQ, {}, std::nullopt}, 1.0, Format::Json);
  const auto j = nlohmann::json::parse(os.str());
  const auto& t = j["u"]["t"];
  const auto& v = j["u"]["density"];
  REQUIRE(t.size() == v.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double k = t[i].get<double>();
    worst = std::max(worst, std::abs(v[i].get<double>() - 1.0 / (M_PI * (1.0 + k * k))));
  }
  CHECK(worst < 1e-10);
  for (const char* m : {"mass_v", "mass_w", "mass_u"}) CHECK(std::abs(j[m].get<double>() - 1.0) < 1e-8);
}
