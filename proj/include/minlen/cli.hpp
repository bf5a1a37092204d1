#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "minlen/error.hpp"
#include "minlen/relations.hpp"

namespace minlen::cli {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Malformed or unreadable configuration; maps to exit status 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

struct StateSelector {
  CatalogName name = CatalogName::UniformQ;
  std::vector<double> shape;
  std::optional<std::uint64_t> seed;
};

struct BinChoice {
  double delta_k = 0.5;
  double delta_x = 0.5;
  double origin = 0.0;
};

/// Shifts the lhs of every report of one relation; used to exercise the
/// failure path.
struct Perturbation {
  RelationId relation = RelationId::BbmCorrected;
  double lhs_shift = 0.0;
};

enum class Format { Json, Csv };

struct RunConfig {
  std::vector<double> beta_grid{1e-3, 0.1, 1.0};
  std::vector<double> sigma_grid{1.0};
  std::vector<double> alpha_grid{1.5, 2.0};
  std::vector<StateSelector> states;
  std::vector<BinChoice> bins{BinChoice{}};
  double margin_floor = kMarginFloor;
  double error_factor = kErrorFactor;
  // truncated_gaussian_q width used for the small-beta expansion check;
  // 0 turns the check off
  double linearization_width = 1.0;
  std::vector<double> linearization_betas{1e-2, 1e-3};
  std::vector<Perturbation> perturbations;
  std::string output_path;
  Format format = Format::Json;
};

/// Default catalog: every reference state, random_fourier_q with seed 1.
std::vector<StateSelector> default_states();

/// Reads a JSON config.  Missing keys keep their defaults; unknown keys,
/// empty grids and negative tolerances raise ConfigError.
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& json_text);
void validate(const RunConfig& config);

/// One report with the coordinates it was computed at.  NaN marks a
/// coordinate that does not apply to the relation.
struct Record {
  RelationReport report;
  std::string state;
  double beta = 0.0;
  double sigma = kNaN;
  double alpha = kNaN;
  double gamma = kNaN;
  double delta_k = kNaN;
  double delta_x = kNaN;
  // sweep extras
  std::string param;
  double param_value = kNaN;
  double correction = kNaN;
  double s_f = kNaN;
  double s_f_bound = kNaN;
};

/// Every applicable check over states x beta x sigma x alpha x bins, sorted
/// by (inputs_digest, relation_id).
std::vector<Record> run_verify(const RunConfig& config);

/// Checks along one axis with the other axes fixed at the first grid value.
/// param is "beta", "sigma" or "alpha".
std::vector<Record> run_sweep(const RunConfig& config, const std::string& param);

bool any_failure(const std::vector<Record>& records);

void write_verify(std::ostream& os, const std::vector<Record>& records, Format format);
void write_sweep(std::ostream& os, const std::vector<Record>& records, Format format);

/// v, w, u tables at their grid nodes with the entropies and masses.
void write_state(std::ostream& os, const StateSelector& selector, double beta, Format format);

/// %.17g, or "null" / "" for non-finite values in JSON / CSV.
std::string number(double v, Format format);

}  // namespace minlen::cli
