#include "acefd/baselines.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "acefd/error.hpp"

namespace acefd::baselines {

namespace {

void check_finite(const ScalarField& f) {
  const std::size_t bad = f.first_non_finite();
  if (bad != f.size()) {
    throw NumericError("non-finite value at node " + std::to_string(bad), bad);
  }
}

double norm_inf(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::fmax(m, std::fabs(x));
  return m;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

bool fex_fd_condition(const SchemeParams& p) noexcept {
  const double eps = p.eps_ratio;
  return eps > 0.0 && eps <= 1.0 / (2.0 * p.dim) &&
         p.dt <= (1.0 - 2.0 * p.dim * eps) / 2.0;
}

ScalarField fex_fd_step(const ScalarField& field, const SchemeParams& params) {
  ScalarField out(field.spec());
  auto next = out.values();
  apply_stencil(field, next);
  auto cur = field.values();
  for (std::size_t i = 0; i < next.size(); ++i) {
    next[i] = cur[i] + params.eps_ratio * next[i] - params.dt * reaction(cur[i]);
  }
  check_finite(out);
  return out;
}

namespace {

class CnSystem {
 public:
  CnSystem(const ScalarField& old, const SchemeParams& p)
      : old_(old), p_(p), scratch_(old.spec()) {
    // Constant part: -phi - (eps/2) Lambda phi + dt/2 f(phi).
    ScalarField lap = apply_stencil(old);
    base_.resize(old.size());
    for (std::size_t i = 0; i < old.size(); ++i) {
      base_[i] = -old[i] - 0.5 * p.eps_ratio * lap[i] +
                 0.5 * p.dt * reaction(old[i]);
    }
  }

  std::vector<double> residual(const ScalarField& u) {
    apply_stencil(u, scratch_.values());
    std::vector<double> r(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
      r[i] = u[i] - 0.5 * p_.eps_ratio * scratch_[i] +
             0.5 * p_.dt * reaction(u[i]) + base_[i];
    }
    return r;
  }

  // y = J(u) x with J = I - (eps/2) Lambda + dt/2 diag(3u^2 - 1).
  void jacobian(const ScalarField& u, const std::vector<double>& x,
                std::vector<double>& y) {
    auto s = scratch_.values();
    std::copy(x.begin(), x.end(), s.begin());
    ScalarField lap = apply_stencil(scratch_);
    for (std::size_t i = 0; i < x.size(); ++i) {
      y[i] = x[i] - 0.5 * p_.eps_ratio * lap[i] +
             0.5 * p_.dt * (3.0 * u[i] * u[i] - 1.0) * x[i];
    }
  }

 private:
  const ScalarField& old_;
  const SchemeParams& p_;
  ScalarField scratch_;
  std::vector<double> base_;
};

// Conjugate gradient for J x = b from x = 0. Returns iterations used.
int conjugate_gradient(CnSystem& sys, const ScalarField& u,
                       const std::vector<double>& b, std::vector<double>& x,
                       double tol, int max_iter) {
  const std::size_t n = b.size();
  x.assign(n, 0.0);
  std::vector<double> r = b;
  std::vector<double> p = r;
  std::vector<double> ap(n);
  double rr = dot(r, r);
  const double stop = tol * tol * std::fmax(rr, 1e-300);
  int it = 0;
  while (it < max_iter && rr > stop) {
    sys.jacobian(u, p, ap);
    const double pap = dot(p, ap);
    if (!(pap > 0.0)) {
      throw IterationError("CN Jacobian is not positive definite",
                           std::sqrt(rr));
    }
    const double alpha = rr / pap;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
    }
    const double rr_new = dot(r, r);
    const double beta = rr_new / rr;
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
    rr = rr_new;
    ++it;
  }
  return it;
}

}  // namespace

ScalarField cn_step(const ScalarField& field, const SchemeParams& params,
                    const NewtonOptions& options, CnReport* report) {
  if (!(options.tolerance > 0.0)) {
    throw InvalidArgument("newton tolerance must be positive");
  }
  CnSystem sys(field, params);
  ScalarField u = field;
  std::vector<double> r = sys.residual(u);
  double rnorm = norm_inf(r);
  CnReport rep;
  std::vector<double> delta;
  std::vector<double> rhs(r.size());
  ScalarField trial(field.spec());
  while (rnorm > options.tolerance) {
    if (rep.newton_iterations >= options.max_iterations) {
      std::ostringstream m;
      m << "CN Newton did not converge after " << options.max_iterations
        << " iterations, residual " << rnorm;
      throw IterationError(m.str(), rnorm);
    }
    for (std::size_t i = 0; i < r.size(); ++i) rhs[i] = -r[i];
    rep.cg_iterations += conjugate_gradient(sys, u, rhs, delta,
                                            options.cg_tolerance,
                                            options.cg_max_iterations);
    double lambda = 1.0;
    std::vector<double> r_trial;
    double trial_norm = 0.0;
    for (int h = 0; h <= options.max_halvings; ++h) {
      for (std::size_t i = 0; i < u.size(); ++i) {
        trial[i] = u[i] + lambda * delta[i];
      }
      r_trial = sys.residual(trial);
      trial_norm = norm_inf(r_trial);
      if (trial_norm < rnorm) break;
      lambda *= 0.5;
    }
    ++rep.newton_iterations;
    if (!(trial_norm < rnorm)) {
      // No halving reduced the residual: stagnation.
      std::ostringstream m;
      m << "CN Newton stagnated at residual " << rnorm;
      throw IterationError(m.str(), rnorm);
    }
    std::swap(u, trial);
    r = std::move(r_trial);
    rnorm = trial_norm;
  }
  rep.residual = rnorm;
  check_finite(u);
  if (report) *report = rep;
  return u;
}

}  // namespace acefd::baselines
