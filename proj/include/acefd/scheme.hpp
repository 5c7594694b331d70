#pragma once

// The node-wise implicit-explicit update
//
//   phi^{n+1} + dt/2 f(phi^{n+1}) = xi,
//   xi = (1 - 2 d eps) phi^n - dt/2 f(phi^n) + eps * neighbour sum,
//
// with f(phi) = phi^3 - phi and eps the dimensionless stencil weight. Each
// node's cubic is solved in closed form.

#include <string>
#include <utility>
#include <vector>

#include "acefd/grid.hpp"

namespace acefd {

inline double reaction(double phi) noexcept { return phi * phi * phi - phi; }

enum class Safety { kValidated, kUnsafe };

// A violated maximum-principle condition.
struct ParamViolation {
  enum class Condition { kWeightRange, kRelaxation, kTimeStep, kCubicTimeStep };
  Condition condition;
  std::string message;
};

const char* to_string(ParamViolation::Condition c) noexcept;

struct SchemeParams {
  int dim = 1;
  double omega1 = 1.0 / 3.0;  // lattice weight of each moving velocity
  double relaxation = 2.0;    // s
  double dx = 1.0;
  double dt = 0.1;
  double eps_interface = 0.0;  // physical interfacial parameter
  double eps_ratio = 0.0;      // omega1 / s, multiplies the stencil
  double lattice_speed = 10.0; // dx / dt
  Safety safety = Safety::kValidated;

  double omega0() const noexcept { return 1.0 - 2.0 * dim * omega1; }
  // c_s^2 = 2 omega1 c^2
  double sound_speed_sq() const noexcept {
    return 2.0 * omega1 * lattice_speed * lattice_speed;
  }
  double diffusion() const noexcept { return eps_interface * eps_interface; }
  bool unsafe() const noexcept { return safety == Safety::kUnsafe; }
};

// Conditions for the discrete maximum principle:
//   0 < omega1 <= 1/(2d),  s > 1,  dt <= 1 - 2 d omega1 / s,
// plus dt < 2, without which the cubic can have several real roots.
std::vector<ParamViolation> check_max_principle(const SchemeParams& params);

// eps = eps_interface^2 dt / dx^2, s = omega1 / eps, c = dx / dt.
// In validated mode throws ValidationError naming every violated condition.
SchemeParams derive_params(int dim, double omega1, double eps_interface,
                           double dx, double dt,
                           Safety safety = Safety::kValidated);

// Same, starting from the stencil weight eps instead of eps_interface.
SchemeParams params_from_ratio(int dim, double omega1, double eps_ratio,
                               double dx, double dt,
                               Safety safety = Safety::kValidated);

double xi_at_node(const ScalarField& field, const MultiIndex& node,
                  const SchemeParams& params);

// Unique real root of theta + dt/2 (theta^3 - theta) = xi for 0 < dt < 2,
// via Cardano's formula followed by one Newton correction.
// Throws InvalidArgument for dt outside (0, 2).
double solve_cubic(double xi, double dt);

// The same cubic's residual p(theta).
inline double cubic_residual(double theta, double xi, double dt) noexcept {
  return theta + 0.5 * dt * reaction(theta) - xi;
}

struct StepReport {
  double max_abs = 0.0;
  double xi_min = 0.0;
  double xi_max = 0.0;
  double max_residual = 0.0;
  // Nodes where the closed form plus one correction left a residual above
  // 1e-12 and safeguarded Newton iterations took over.
  long newton_fallback_count = 0;
};

// One time step from `in` into `out` (distinct fields on the same grid).
// Validated mode raises InvariantError if any |xi| > 1 + 1e-12. Raises
// NumericError on the first non-finite node.
StepReport step(const ScalarField& in, ScalarField& out,
                const SchemeParams& params);

std::pair<ScalarField, StepReport> step(const ScalarField& field,
                                        const SchemeParams& params);

// Node-wise cubic resolution used by both the macroscopic and kinetic paths.
// `xi` is overwritten with the new values.
void resolve_cubic(std::span<double> xi_to_phi, double dt, StepReport& report,
                   bool check_bounds);

}  // namespace acefd
