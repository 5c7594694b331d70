#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "acefd/grid.hpp"
#include "acefd/scheme.hpp"

namespace acefd {

struct EnergyRecord {
  double t = 0.0;
  double energy = 0.0;
  double max_abs = 0.0;
};

// E = dx^d [ 1/4 sum (phi_i^2 - 1)^2 - eps/(2 dt) phi . (Lambda phi) ]
// with compensated summation of both sums.
double discrete_energy(const ScalarField& field, const SchemeParams& params);

// -phi . (Lambda phi), compensated.
double stencil_quadratic_form(const ScalarField& field);

struct MonotoneVerdict {
  bool pass = true;
  // Index i of the first record with E[i] - E[i-1] > tol.
  std::optional<std::size_t> first_violation;
  double worst_increase = 0.0;
};

// tol < 0 selects the default 1e-12 * max |E|.
MonotoneVerdict check_energy_monotone(std::span<const EnergyRecord> records,
                                      double tol = -1.0);

// Checks on M = (4 - dt) I + 2 eps Lambda, the matrix whose definiteness gives
// energy decay.
struct MatrixVerdict {
  bool symmetric = false;
  // Boundary-specific time-step condition: dt <= 4(1 - 2 d eps) for
  // Neumann/periodic, strict for Dirichlet, together with 4 - dt - 4 d eps > 0.
  bool dominance_condition = false;
  // Row-wise: positive diagonal, weak dominance everywhere, and either strict
  // everywhere or strict somewhere on the connected grid.
  bool row_dominance = false;
  bool positive_definite = false;
  std::optional<double> min_eigenvalue;  // only for small grids
  std::string detail;

  bool pass() const noexcept {
    return symmetric && dominance_condition && positive_definite;
  }
};

// Throws InvalidArgument when the grid has more than 4096 nodes.
MatrixVerdict check_energy_matrix(const SchemeParams& params,
                                    const GridSpec& spec);

struct ErrorNorms {
  double err_inf = 0.0;
  // sqrt(dx^d * sum e_i^2) over the stored nodes.
  double err_l2 = 0.0;
  // sqrt(sum e_i^2 / (N+1)^d), the normalisation used by the reference values.
  double err_rms = 0.0;
};

// Throws InvalidArgument when the grids differ.
ErrorNorms error_norms(const ScalarField& numeric,
                       const ScalarField& reference);

struct ErrorReport {
  double dx = 0.0;
  double err_inf = 0.0;
  double err_l2 = 0.0;
  std::optional<double> cr_inf;
  std::optional<double> cr_l2;
};

enum class Refinement { kHalving, kAny };

// CR = log(E_coarse / E_fine) / log(dx_coarse / dx_fine). With kHalving the
// spacings must halve (1e-9 relative) or InvalidArgument is thrown; kAny only
// requires strictly decreasing spacings. A rate is left empty when either
// error is zero.
std::vector<ErrorReport> convergence_rates(std::vector<ErrorReport> reports,
                                           Refinement rule = Refinement::kHalving);

// Neumaier-compensated accumulator.
class CompensatedSum {
 public:
  void add(double v) noexcept;
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace acefd
