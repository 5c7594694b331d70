#pragma once

// Flat `key = value` run configuration. See docs/config.md for the grammar.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "acefd/baselines.hpp"
#include "acefd/grid.hpp"
#include "acefd/problems.hpp"
#include "acefd/scheme.hpp"

namespace acefd {

enum class SchemeKind { kRlbMieFd, kFexFd, kCrankNicolson, kKinetic };
enum class DtRule { kFixedRatioDx2, kFixed };
enum class SnapshotFormat { kCsv, kBinary };

const char* to_string(SchemeKind kind) noexcept;
const char* to_string(DtRule rule) noexcept;
SchemeKind parse_scheme(const std::string& text);
DtRule parse_dt_rule(const std::string& text);

// Raw key/value store with lazy expression evaluation. Numeric values may be
// arithmetic expressions over numbers, pi, the functions sqrt, cbrt, tanh,
// exp, log, sin, cos, abs, and the names of other numeric keys.
class Config {
 public:
  // Throws ConfigError with the line number on malformed input.
  static Config parse(const std::string& text, const std::string& origin = "");
  static Config load(const std::string& path);

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;
  const std::string& raw(const std::string& key) const;
  std::vector<std::string> keys() const;

  // Numeric value of `key` or a derived name (dx, length, dim,
  // eps_interface, eps_ratio). Throws ConfigError on unknown names, cycles
  // and non-finite results.
  double number(const std::string& key) const;
  std::vector<double> number_list(const std::string& key) const;
  bool flag(const std::string& key) const;

  // Evaluates a free expression in the context of this config.
  double evaluate(const std::string& expression) const;

  const std::string& origin() const noexcept { return origin_; }

 private:
  struct Entry {
    std::string value;
    int line = 0;
  };
  std::map<std::string, Entry> entries_;
  std::string origin_;

  double lookup(const std::string& name, std::vector<std::string>& stack) const;
  double eval_in(const std::string& text, std::vector<std::string>& stack) const;
};

struct RunConfig {
  std::string label;
  ProblemSpec problem;
  SchemeKind scheme = SchemeKind::kRlbMieFd;
  int subdivisions = 0;
  double dt = 0.0;
  double t_end = 0.0;
  double omega1 = 0.0;
  // When set, the stencil weight is held fixed and eps_interface follows
  // from it; otherwise eps_interface is fixed and the weight follows.
  std::optional<double> eps_ratio;
  std::vector<double> snapshot_times;
  SnapshotFormat snapshot_format = SnapshotFormat::kCsv;
  std::string output_dir;
  bool allow_unsafe = false;
  int energy_stride = 1;
  DtRule dt_rule = DtRule::kFixedRatioDx2;
  std::vector<int> level_subdivisions;
  std::optional<int> reference_subdivisions;
  std::optional<double> reference_dt;
  baselines::NewtonOptions newton;

  GridSpec grid() const;
  double dx() const;
  long step_count() const;
  // Scheme parameters; validated unless allow_unsafe. The FEX and CN
  // schemes are always built in unsafe mode here and checked by
  // validate_run_config instead.
  SchemeParams params() const;
};

// Builds a RunConfig, throwing ConfigError for missing or inconsistent keys.
RunConfig make_run_config(const Config& config);

// Structural checks plus the scheme's parameter conditions (skipped when
// allow_unsafe). Throws ConfigError or ValidationError.
void validate_run_config(const RunConfig& config);

double default_omega1(int dim);

}  // namespace acefd
