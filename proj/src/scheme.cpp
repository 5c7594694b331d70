#include "acefd/scheme.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "acefd/error.hpp"

namespace acefd {

const char* to_string(ParamViolation::Condition c) noexcept {
  switch (c) {
    case ParamViolation::Condition::kWeightRange:
      return "weight-range";
    case ParamViolation::Condition::kRelaxation:
      return "relaxation";
    case ParamViolation::Condition::kTimeStep:
      return "time-step";
    case ParamViolation::Condition::kCubicTimeStep:
      return "cubic-time-step";
  }
  return "unknown";
}

std::vector<ParamViolation> check_max_principle(const SchemeParams& p) {
  using C = ParamViolation::Condition;
  std::vector<ParamViolation> out;
  const double wmax = 1.0 / (2.0 * p.dim);
  if (!(p.omega1 > 0.0 && p.omega1 <= wmax)) {
    std::ostringstream m;
    m << "omega1 = " << p.omega1 << " outside (0, " << wmax << "]";
    out.push_back({C::kWeightRange, m.str()});
  }
  if (!(p.relaxation > 1.0)) {
    std::ostringstream m;
    m << "relaxation s = " << p.relaxation << " must exceed 1";
    out.push_back({C::kRelaxation, m.str()});
  }
  const double bound = 1.0 - 2.0 * p.dim * p.omega1 / p.relaxation;
  if (!(p.dt <= bound)) {
    std::ostringstream m;
    m << "dt = " << p.dt << " exceeds 1 - 2 d omega1 / s = " << bound;
    out.push_back({C::kTimeStep, m.str()});
  }
  if (!(p.dt < 2.0)) {
    std::ostringstream m;
    m << "dt = " << p.dt << " must be below 2 for a unique cubic root";
    out.push_back({C::kCubicTimeStep, m.str()});
  }
  return out;
}

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw InvalidArgument(std::string(name) + " must be positive and finite");
  }
}

SchemeParams finish(SchemeParams p) {
  auto violations = check_max_principle(p);
  // A unique root is needed by every mode.
  for (const auto& v : violations) {
    if (v.condition == ParamViolation::Condition::kCubicTimeStep) {
      throw ValidationError(v.message);
    }
  }
  if (p.safety == Safety::kValidated && !violations.empty()) {
    std::string msg = "maximum-principle conditions violated:";
    for (const auto& v : violations) {
      msg += " [";
      msg += to_string(v.condition);
      msg += "] " + v.message + ";";
    }
    throw ValidationError(msg);
  }
  return p;
}

}  // namespace

SchemeParams derive_params(int dim, double omega1, double eps_interface,
                           double dx, double dt, Safety safety) {
  if (dim < 1 || dim > kMaxDim) throw InvalidArgument("dimension must be 1..3");
  require_positive(omega1, "omega1");
  require_positive(eps_interface, "eps_interface");
  require_positive(dx, "dx");
  require_positive(dt, "dt");
  SchemeParams p;
  p.dim = dim;
  p.omega1 = omega1;
  p.dx = dx;
  p.dt = dt;
  p.eps_interface = eps_interface;
  p.eps_ratio = eps_interface * eps_interface * dt / (dx * dx);
  p.relaxation = omega1 / p.eps_ratio;
  p.lattice_speed = dx / dt;
  p.safety = safety;
  return finish(p);
}

SchemeParams params_from_ratio(int dim, double omega1, double eps_ratio,
                               double dx, double dt, Safety safety) {
  if (dim < 1 || dim > kMaxDim) throw InvalidArgument("dimension must be 1..3");
  require_positive(omega1, "omega1");
  require_positive(eps_ratio, "eps_ratio");
  require_positive(dx, "dx");
  require_positive(dt, "dt");
  SchemeParams p;
  p.dim = dim;
  p.omega1 = omega1;
  p.dx = dx;
  p.dt = dt;
  p.eps_ratio = eps_ratio;
  p.eps_interface = std::sqrt(eps_ratio * dx * dx / dt);
  p.relaxation = omega1 / eps_ratio;
  p.lattice_speed = dx / dt;
  p.safety = safety;
  return finish(p);
}

namespace {

inline double xi_value(double phi, double nsum, double centre_weight,
                       double eps, double half_dt) noexcept {
  return centre_weight * phi - half_dt * reaction(phi) + eps * nsum;
}

inline double closed_form_root(double xi, double dt) noexcept {
  // Odd symmetry: root(-xi) = -root(xi). Working with |xi| keeps
  // zeta + sqrt(.) free of cancellation.
  const double zeta = std::fabs(xi) / dt;
  const double shift = (dt - 2.0) / (3.0 * dt);  // negative for dt < 2
  const double shift3 = shift * shift * shift;
  const double root = std::sqrt(zeta * zeta - shift3);
  const double upper = zeta + root;
  double theta;
  if (upper < 1e-300) {
    theta = std::cbrt(upper) + std::cbrt(zeta - root);
  } else {
    const double a = std::cbrt(upper);
    theta = a + shift / a;
  }
  return std::signbit(xi) ? -theta : theta;
}

inline double newton_update(double theta, double xi, double dt) noexcept {
  const double p = cubic_residual(theta, xi, dt);
  const double dp = 1.0 + 0.5 * dt * (3.0 * theta * theta - 1.0);
  return theta - p / dp;
}

// Newton safeguarded by bisection on the bracket of the monotone cubic.
double safeguarded_root(double xi, double dt, double start) {
  const double bound = std::max(1.0, std::fabs(xi));
  double lo = -bound;
  double hi = bound;
  double theta = std::clamp(start, lo, hi);
  for (int it = 0; it < 200; ++it) {
    const double p = cubic_residual(theta, xi, dt);
    if (p == 0.0) return theta;
    if (p > 0.0) {
      hi = theta;
    } else {
      lo = theta;
    }
    double next = newton_update(theta, xi, dt);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == theta || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * bound) {
      return next;
    }
    theta = next;
  }
  return theta;
}

constexpr double kResidualTol = 1e-12;

inline double root_with_fallback(double xi, double dt, long& fallbacks,
                                 double& residual) {
  double theta = newton_update(closed_form_root(xi, dt), xi, dt);
  double r = std::fabs(cubic_residual(theta, xi, dt));
  if (!(r <= kResidualTol * std::max(1.0, std::fabs(xi)))) {
    if (std::isfinite(xi)) {
      ++fallbacks;
      theta = safeguarded_root(xi, dt, std::isfinite(theta) ? theta : 0.0);
      r = std::fabs(cubic_residual(theta, xi, dt));
    }
  }
  residual = r;
  return theta;
}

}  // namespace

double xi_at_node(const ScalarField& field, const MultiIndex& node,
                  const SchemeParams& params) {
  const double nsum = neighbor_sum(field, node);
  const double phi = field.at(node);
  return xi_value(phi, nsum, 1.0 - 2.0 * params.dim * params.eps_ratio,
                  params.eps_ratio, 0.5 * params.dt);
}

double solve_cubic(double xi, double dt) {
  if (!(dt > 0.0 && dt < 2.0)) {
    throw InvalidArgument("solve_cubic requires 0 < dt < 2");
  }
  long fallbacks = 0;
  double residual = 0.0;
  return root_with_fallback(xi, dt, fallbacks, residual);
}

void resolve_cubic(std::span<double> values, double dt, StepReport& report,
                   bool check_bounds) {
  if (!(dt > 0.0 && dt < 2.0)) {
    throw InvalidArgument("cubic resolution requires 0 < dt < 2");
  }
  constexpr double kXiTol = 1e-12;
  double xi_min = std::numeric_limits<double>::infinity();
  double xi_max = -std::numeric_limits<double>::infinity();
  double max_residual = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double xi = values[i];
    if (!std::isfinite(xi)) {
      throw NumericError("non-finite xi at node " + std::to_string(i), i);
    }
    if (check_bounds && std::fabs(xi) > 1.0 + kXiTol) {
      std::ostringstream m;
      m.precision(17);
      m << "xi = " << xi << " at node " << i << " leaves [-1, 1]";
      throw InvariantError(m.str());
    }
    xi_min = std::min(xi_min, xi);
    xi_max = std::max(xi_max, xi);
    double residual = 0.0;
    values[i] = root_with_fallback(xi, dt, report.newton_fallback_count,
                                   residual);
    max_residual = std::max(max_residual, residual);
  }
  report.xi_min = xi_min;
  report.xi_max = xi_max;
  report.max_residual = max_residual;
}

StepReport step(const ScalarField& in, ScalarField& out,
                const SchemeParams& params) {
  if (!(in.spec() == out.spec())) {
    throw InvalidArgument("step: input and output grids differ");
  }
  if (in.spec().dim() != params.dim) {
    throw InvalidArgument("step: parameter dimension does not match grid");
  }
  auto next = out.values();
  neighbor_sums(in, next);
  const double eps = params.eps_ratio;
  const double centre = 1.0 - 2.0 * params.dim * eps;
  const double half_dt = 0.5 * params.dt;
  auto cur = in.values();
  for (std::size_t i = 0; i < next.size(); ++i) {
    next[i] = xi_value(cur[i], next[i], centre, eps, half_dt);
  }
  StepReport report;
  resolve_cubic(next, params.dt, report, !params.unsafe());
  const std::size_t bad = out.first_non_finite();
  if (bad != out.size()) {
    throw NumericError("non-finite value at node " + std::to_string(bad), bad);
  }
  report.max_abs = out.max_abs();
  return report;
}

std::pair<ScalarField, StepReport> step(const ScalarField& field,
                                        const SchemeParams& params) {
  ScalarField out(field.spec());
  StepReport r = step(field, out, params);
  return {std::move(out), r};
}

}  // namespace acefd
