#pragma once

// Run configuration for the fermibath command-line tool.
//
// YAML document with the sections model, quadrature, grid, output, oracle
// and an optional top-level command. Model entries may be lists; evolve and
// scan runs expand them into every combination.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "fermibath/fermibath.h"

namespace fermibath::cli {

class ConfigError : public std::runtime_error {
public:
  // line is 1-based; 0 when the value did not come from a file
  ConfigError(const std::string& message, std::size_t line = 0, std::string key = {});
  std::size_t line() const noexcept { return line_; }
  const std::string& key() const noexcept { return key_; }

private:
  std::size_t line_;
  std::string key_;
};

struct ModelBlock {
  std::vector<double> Omega{1.0};
  std::vector<double> g0{0.1};
  std::vector<double> gamma{12.0};
  std::vector<double> T{1.0};
  std::vector<double> mu{0.0};
  std::vector<std::string> statistics{"fermi"};
  std::vector<double> n0{0.0};
  bool operator==(const ModelBlock&) const = default;
};

struct QuadratureBlock {
  double rel_tol = 1e-8;
  double abs_tol = 1e-12;
  std::size_t max_panels = std::size_t(1) << 22;
  double panel_scale = 1.0;
  double w_max = 0.0;  // 0: built-in cutoff policy
  unsigned threads = 1;
  bool operator==(const QuadratureBlock&) const = default;
};

struct GridBlock {
  double t_max = 40.0;
  std::size_t points = 0;  // 0: default grid (dense near 0, geometric growth)
  std::string scan = "T";  // T, g0 or mu
  double from = 0.1;
  double to = 5.0;
  std::size_t count = 40;
  std::string spacing = "linear";  // linear or log
  std::vector<double> values;      // explicit scan values; overrides from/to/count
  bool operator==(const GridBlock&) const = default;
};

struct OutputBlock {
  std::string path = "-";   // file, directory for several runs, or - for stdout
  std::string format = "csv";
  bool transport = true;    // evolve: lambda and diffusion columns
  bool operator==(const OutputBlock&) const = default;
};

struct OracleBlock {
  std::size_t modes = 0;  // 0: no oracle column
  double w_max = 0.0;     // 0: 20 gamma
  std::string initial = "product";  // product or dressed
  bool operator==(const OracleBlock&) const = default;
};

struct RunConfig {
  std::string command;  // empty: taken from the command line
  unsigned jobs = 1;
  ModelBlock model;
  QuadratureBlock quadrature;
  GridBlock grid;
  OutputBlock output;
  OracleBlock oracle;
  bool operator==(const RunConfig&) const = default;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
// Canonical YAML; parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& c);

// "section.key=value", value in YAML scalar or flow-list syntax.
void apply_override(RunConfig& c, const std::string& assignment);
// "N=4000" or "N=4000,w_max=240"
void apply_oracle_flag(RunConfig& c, const std::string& flag);

// Cross-field checks (known statistics, scan variable, formats); throws ConfigError.
void check_config(const RunConfig& c);

// One model point of the Cartesian product of the model lists.
struct Combination {
  fb_params params;
  std::vector<std::string> varying;  // "g0=0.1" labels of the keys that take several values
};
// skip: a model key whose list is ignored (the scan variable); statistics_fixed drops the statistics list.
std::vector<Combination> expand_model(const ModelBlock& m, const std::string& skip = {},
                                      bool statistics_fixed = false);

std::vector<double> scan_values(const GridBlock& g);
fb_quadrature to_quadrature(const QuadratureBlock& q);

}  // namespace fermibath::cli
