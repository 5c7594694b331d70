#pragma once

// Experiment orchestration: single runs, refinement studies and side-by-side
// scheme comparisons, with CSV/JSON output.

#include <optional>
#include <string>
#include <vector>

#include "acefd/config.hpp"
#include "acefd/diagnostics.hpp"
#include "acefd/grid.hpp"

namespace acefd {

enum class RunStatus {
  kOk,
  kInvariantViolated,  // validated mode only
  kNumericFailure,     // non-finite values
  kIterationFailure,   // CN Newton did not converge
};

const char* to_string(RunStatus status) noexcept;

// 0 ok, 3 invariant violated, 4 numeric or iteration failure.
int exit_code(RunStatus status) noexcept;

struct RadiusRecord {
  double t = 0.0;
  std::optional<double> radius;    // empty once the interface is gone
  std::optional<double> expected;  // empty past the extinction time
};

struct RunSummary {
  std::string label;
  SchemeKind scheme = SchemeKind::kRlbMieFd;
  RunStatus status = RunStatus::kOk;
  std::string message;
  long steps_requested = 0;
  long steps_completed = 0;
  double t_final = 0.0;
  double max_abs_peak = 0.0;
  bool max_principle_held = true;  // every |phi| <= 1 + 1e-13
  bool energy_monotone = true;     // every step E increase <= 1e-12 max(1,|E|)
  std::optional<long> first_energy_increase;  // step index
  double worst_energy_increase = 0.0;
  long newton_fallbacks = 0;
  std::optional<ErrorNorms> error;  // against the exact solution at t_end
  std::vector<EnergyRecord> energy;  // index = step
  std::vector<RadiusRecord> radius;  // curvature problems only
  ScalarField final_field;
  double wall_seconds = 0.0;
};

// Relative per-step tolerance for the energy monitor and the absolute
// max-norm slack.
inline constexpr double kEnergyTolerance = 1e-12;
inline constexpr double kMaxNormSlack = 1e-13;

// Runs the configured simulation for round(t_end/dt) steps. Invariant and
// numeric failures are reported through the summary status rather than
// thrown. Throws ConfigError / ValidationError for invalid configs and
// IoError when output cannot be written. Writes nothing when output_dir is
// empty.
RunSummary run(const RunConfig& config);

struct ConvergenceRow {
  int subdivisions = 0;
  double dx = 0.0;
  double dt = 0.0;
  long steps = 0;
  ErrorNorms error;
  std::optional<double> cr_inf;
  std::optional<double> cr_l2;
  std::optional<double> cr_rms;
};

struct ConvergenceTable {
  std::string reference;  // "exact", "reference_run" or "finest_level"
  std::vector<ConvergenceRow> rows;
};

// Levels come from level_subdivisions when given (first `levels` entries),
// otherwise subdivisions * 2^k. Under kFixedRatioDx2 dt scales with dx^2
// from the base dt; under kFixed it stays put. The reference is the exact
// solution when the problem has one, else a run at reference_subdivisions /
// reference_dt when configured, else the finest level (which then gets no
// row). Reference values are carried to coarse nodes by multilinear
// interpolation. A failed level throws the matching InvariantError,
// NumericError or IterationError.
ConvergenceTable converge(const RunConfig& base, int levels);
ConvergenceTable converge(const RunConfig& base, int levels, DtRule rule);

// Runs every config (they must share problem and grid) and never aborts on
// a failed run: failures show up in the row status. Every config is
// validated before the first run starts. Throws ConfigError when the configs
// disagree on problem or grid. Run i writes into output_dir/<i>_<label>.
std::vector<RunSummary> compare(const std::vector<RunConfig>& configs,
                                const std::string& output_dir);

// Values of `fine` at the nodes of `coarse` (same problem domain and BC) by
// multilinear interpolation; exact where nodes coincide.
ScalarField sample_onto(const ScalarField& fine, const GridSpec& coarse);

// Output helpers. All files are written to a temporary name and renamed.
void write_energy_csv(const std::string& path,
                      const std::vector<EnergyRecord>& records, int stride);
void write_snapshot_csv(const std::string& path, const ScalarField& field);
void write_snapshot_binary(const std::string& path, const ScalarField& field);
ScalarField read_snapshot_binary(const std::string& path, const GridSpec& spec);
void write_convergence_csv(const std::string& path,
                           const ConvergenceTable& table);
void write_compare_csv(const std::string& path,
                       const std::vector<RunSummary>& rows);
std::string summary_json(const RunSummary& summary, const RunConfig& config);

}  // namespace acefd
