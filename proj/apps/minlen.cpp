#include <omp.h>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "minlen/cli.hpp"

namespace {

using namespace minlen;
using namespace minlen::cli;

constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

// "name" or "name#seed"
StateSelector parse_selector(const std::string& text) {
  StateSelector s;
  const auto hash = text.find('#');
  s.name = parse_catalog_name(text.substr(0, hash));
  if (hash != std::string::npos) {
    try {
      s.seed = std::stoull(text.substr(hash + 1));
    } catch (const std::exception&) {
      throw ConfigError("bad seed in '" + text + "'");
    }
  }
  if (s.name == CatalogName::RandomFourierQ && !s.seed) s.seed = 1;
  return s;
}

Format parse_format(const std::string& f) {
  if (f == "json") return Format::Json;
  if (f == "csv") return Format::Csv;
  throw ConfigError("format must be json or csv");
}

void apply_threads() {
  const char* t = std::getenv("THREADS");
  if (!t || !*t) return;
  char* end = nullptr;
  const long n = std::strtol(t, &end, 10);
  if (*end != '\0' || n < 1) throw ConfigError("THREADS must be a positive integer");
  omp_set_num_threads(static_cast<int>(n));
}

template <class Write>
void emit(const std::string& path, Write&& write) {
  if (path.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  write(out);
  if (!out) throw ConfigError("failed writing '" + path + "'");
}

struct RunOptions {
  std::string config_path;
  std::vector<double> beta, sigma, alpha;
  std::vector<std::string> states;
  std::string out;
  std::string format;
};

void add_run_options(CLI::App* cmd, RunOptions& o) {
  cmd->add_option("--config", o.config_path, "JSON run configuration");
  cmd->add_option("--beta", o.beta, "beta grid (overrides the config)");
  cmd->add_option("--sigma", o.sigma, "acceptance width grid");
  cmd->add_option("--alpha", o.alpha, "Renyi order grid (gamma is the conjugate)");
  cmd->add_option("--state", o.states, "catalog state, name or name#seed");
  cmd->add_option("--out", o.out, "report path (default stdout)");
  cmd->add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
}

RunConfig resolve(const RunOptions& o, CLI::App* cmd) {
  RunConfig c;
  c.states = default_states();
  if (!o.config_path.empty()) c = load_config(o.config_path);
  // an explicitly empty list on the command line is a usage error, not a default
  if (cmd->count("--beta")) c.beta_grid = o.beta;
  if (cmd->count("--sigma")) c.sigma_grid = o.sigma;
  if (cmd->count("--alpha")) c.alpha_grid = o.alpha;
  if (cmd->count("--state")) {
    c.states.clear();
    for (const auto& s : o.states) c.states.push_back(parse_selector(s));
  }
  if (!o.out.empty()) c.output_path = o.out;
  if (!o.format.empty()) c.format = parse_format(o.format);
  validate(c);
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entropic uncertainty certification under a minimal length"};
  app.require_subcommand(1);

  RunOptions verify_opts, sweep_opts;
  CLI::App* verify = app.add_subcommand("verify", "run every applicable relation check");
  add_run_options(verify, verify_opts);

  CLI::App* sweep = app.add_subcommand("sweep", "margins along one parameter axis");
  add_run_options(sweep, sweep_opts);
  std::string param;
  sweep->add_option("--param", param, "beta, sigma or alpha")
      ->required()
      ->check(CLI::IsMember({"beta", "sigma", "alpha"}));

  CLI::App* show = app.add_subcommand("show-state", "dump v, w, u tables and entropies");
  std::string name, show_out, show_format = "json";
  double beta = 0.0;
  std::vector<double> shape;
  show->add_option("--name", name, "catalog state, name or name#seed")->required();
  show->add_option("--beta", beta, "deformation parameter")->required();
  show->add_option("--shape", shape, "shape arguments of the state");
  show->add_option("--out", show_out, "output path (default stdout)");
  show->add_option("--format", show_format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    apply_threads();
    if (verify->parsed()) {
      const RunConfig c = resolve(verify_opts, verify);
      const auto records = run_verify(c);
      emit(c.output_path, [&](std::ostream& os) { write_verify(os, records, c.format); });
      return any_failure(records) ? kExitFail : 0;
    }
    if (sweep->parsed()) {
      const RunConfig c = resolve(sweep_opts, sweep);
      const auto records = run_sweep(c, param);
      emit(c.output_path, [&](std::ostream& os) { write_sweep(os, records, c.format); });
      return any_failure(records) ? kExitFail : 0;
    }
    StateSelector sel = parse_selector(name);
    sel.shape = shape;
    if (!(beta >= 0.0)) throw ConfigError("beta must be >= 0");
    const Format f = parse_format(show_format);
    emit(show_out, [&](std::ostream& os) { write_state(os, sel, beta, f); });
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InvalidParameter& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFail;
  }
}
