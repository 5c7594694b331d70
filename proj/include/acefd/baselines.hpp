#pragma once

// Reference schemes used for stability and accuracy comparisons.

#include "acefd/grid.hpp"
#include "acefd/scheme.hpp"

namespace acefd::baselines {

enum class BaselineKind { kExplicit, kCrankNicolson };

// Fully explicit Euler: phi + eps Lambda phi - dt f(phi).
// Throws NumericError on the first non-finite node.
ScalarField fex_fd_step(const ScalarField& field, const SchemeParams& params);

// Sufficient condition for the explicit scheme to keep |phi| <= 1:
// dt <= (1 - 2 d eps) / 2 with 0 < eps <= 1/(2d).
bool fex_fd_condition(const SchemeParams& params) noexcept;

struct NewtonOptions {
  double tolerance = 1e-12;  // infinity norm of the residual
  int max_iterations = 50;
  int max_halvings = 20;
  double cg_tolerance = 1e-13;
  int cg_max_iterations = 10000;
};

struct CnReport {
  int newton_iterations = 0;
  int cg_iterations = 0;
  double residual = 0.0;
};

// Crank-Nicolson in both diffusion and reaction:
//   u - phi = dt/2 [ (eps/dt) Lambda (phi + u) - f(phi) - f(u) ]
// solved by damped Newton with conjugate-gradient inner solves.
// Throws IterationError if the residual stays above the tolerance.
ScalarField cn_step(const ScalarField& field, const SchemeParams& params,
                    const NewtonOptions& options = {},
                    CnReport* report = nullptr);

}  // namespace acefd::baselines
