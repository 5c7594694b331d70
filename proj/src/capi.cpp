#include "acefd/acefd.h"

#include <cmath>
#include <cstring>
#include <limits>
#include <new>
#include <sstream>
#include <string>

#include "acefd/baselines.hpp"
#include "acefd/config.hpp"
#include "acefd/diagnostics.hpp"
#include "acefd/error.hpp"
#include "acefd/harness.hpp"
#include "acefd/kinetic.hpp"
#include "acefd/problems.hpp"
#include "acefd/scheme.hpp"

struct acefd_field {
  acefd::ScalarField field;
};

struct acefd_params {
  acefd::SchemeParams params;
};

struct acefd_config {
  acefd::Config config;
};

namespace {

thread_local std::string g_last_error;

acefd_status fail(acefd_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

acefd_status status_of(acefd::ErrorKind kind) {
  switch (kind) {
    case acefd::ErrorKind::kInvalidArgument:
      return ACEFD_E_ARGUMENT;
    case acefd::ErrorKind::kConfig:
      return ACEFD_E_CONFIG;
    case acefd::ErrorKind::kInvariant:
      return ACEFD_E_INVARIANT;
    case acefd::ErrorKind::kNumeric:
      return ACEFD_E_NUMERIC;
    case acefd::ErrorKind::kIo:
      return ACEFD_E_IO;
    case acefd::ErrorKind::kIndex:
      return ACEFD_E_INDEX;
    case acefd::ErrorKind::kValidation:
      return ACEFD_E_VALIDATION;
    case acefd::ErrorKind::kIteration:
      return ACEFD_E_ITERATION;
    case acefd::ErrorKind::kExtinction:
      return ACEFD_E_EXTINCTION;
  }
  return ACEFD_E_INTERNAL;
}

template <typename F>
acefd_status guard(F&& body) noexcept {
  try {
    return body();
  } catch (const acefd::Error& e) {
    return fail(status_of(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(ACEFD_E_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(ACEFD_E_INTERNAL, e.what());
  } catch (...) {
    return fail(ACEFD_E_INTERNAL, "unknown exception");
  }
}

#define ACEFD_REQUIRE(cond, what) \
  if (!(cond)) return fail(ACEFD_E_ARGUMENT, what)

acefd::Boundary to_bc(acefd_boundary bc) {
  switch (bc) {
    case ACEFD_BC_NEUMANN:
      return acefd::Boundary::kNeumann;
    case ACEFD_BC_DIRICHLET:
      return acefd::Boundary::kDirichlet;
    case ACEFD_BC_PERIODIC:
      return acefd::Boundary::kPeriodic;
  }
  throw acefd::InvalidArgument("unknown boundary condition");
}

acefd::MultiIndex to_node(const acefd::GridSpec& spec, const int* node) {
  acefd::MultiIndex idx{0, 0, 0};
  for (int a = 0; a < spec.dim(); ++a) idx[a] = node[a];
  return idx;
}

acefd_status status_of(acefd::RunStatus s) {
  switch (s) {
    case acefd::RunStatus::kOk:
      return ACEFD_OK;
    case acefd::RunStatus::kInvariantViolated:
      return ACEFD_E_INVARIANT;
    case acefd::RunStatus::kNumericFailure:
      return ACEFD_E_NUMERIC;
    case acefd::RunStatus::kIterationFailure:
      return ACEFD_E_ITERATION;
  }
  return ACEFD_E_INTERNAL;
}

void fill_result(const acefd::RunSummary& s, acefd_run_result* r) {
  r->status = status_of(s.status);
  r->steps_requested = s.steps_requested;
  r->steps_completed = s.steps_completed;
  r->t_final = s.t_final;
  r->max_abs_peak = s.max_abs_peak;
  r->max_principle_held = s.max_principle_held ? 1 : 0;
  r->energy_monotone = s.energy_monotone ? 1 : 0;
  r->energy_initial = s.energy.empty() ? 0.0 : s.energy.front().energy;
  r->energy_final = s.energy.empty() ? 0.0 : s.energy.back().energy;
  r->has_error = s.error ? 1 : 0;
  r->err_inf = s.error ? s.error->err_inf : 0.0;
  r->err_l2 = s.error ? s.error->err_l2 : 0.0;
  r->err_rms = s.error ? s.error->err_rms : 0.0;
  r->wall_seconds = s.wall_seconds;
}

acefd_status make_params(bool from_ratio, int dim, double omega1, double eps,
                         double dx, double dt, int allow_unsafe,
                         acefd_params** out) {
  ACEFD_REQUIRE(out, "out is NULL");
  return guard([&] {
    const double w = omega1 > 0.0 ? omega1 : acefd::default_omega1(dim);
    const acefd::Safety safety =
        allow_unsafe ? acefd::Safety::kUnsafe : acefd::Safety::kValidated;
    acefd::SchemeParams p =
        from_ratio ? acefd::params_from_ratio(dim, w, eps, dx, dt, safety)
                   : acefd::derive_params(dim, w, eps, dx, dt, safety);
    *out = new acefd_params{p};
    return ACEFD_OK;
  });
}

}  // namespace

extern "C" {

const char* acefd_version(void) { return "0.1.0"; }

const char* acefd_last_error(void) { return g_last_error.c_str(); }

const char* acefd_status_string(acefd_status status) {
  switch (status) {
    case ACEFD_OK:
      return "ok";
    case ACEFD_E_ARGUMENT:
      return "invalid argument";
    case ACEFD_E_CONFIG:
      return "configuration error";
    case ACEFD_E_INVARIANT:
      return "invariant violated";
    case ACEFD_E_NUMERIC:
      return "numeric failure";
    case ACEFD_E_IO:
      return "i/o error";
    case ACEFD_E_INDEX:
      return "index out of range";
    case ACEFD_E_VALIDATION:
      return "parameter validation failed";
    case ACEFD_E_ITERATION:
      return "iteration did not converge";
    case ACEFD_E_EXTINCTION:
      return "interface extinct";
    case ACEFD_E_INTERNAL:
      return "internal error";
  }
  return "unknown status";
}

acefd_status acefd_field_create(int dim, int subdivisions, double length,
                                const double* origin, acefd_boundary bc,
                                acefd_field** out) {
  ACEFD_REQUIRE(out, "out is NULL");
  return guard([&] {
    acefd::Point o{0.0, 0.0, 0.0};
    if (origin) {
      for (int a = 0; a < dim && a < acefd::kMaxDim; ++a) o[a] = origin[a];
    }
    acefd::GridSpec spec(dim, subdivisions, length, o, to_bc(bc));
    *out = new acefd_field{acefd::ScalarField(spec)};
    return ACEFD_OK;
  });
}

acefd_status acefd_field_create_problem(const char* problem, int subdivisions,
                                        double eps_interface, double radius0,
                                        double amplitude, uint64_t seed,
                                        acefd_field** out) {
  ACEFD_REQUIRE(out && problem, "NULL argument");
  return guard([&] {
    acefd::ProblemSpec spec;
    spec.kind = acefd::parse_problem(problem);
    spec.eps_interface = eps_interface;
    spec.radius0 = radius0;
    spec.amplitude = amplitude;
    spec.seed = seed;
    const acefd::GridSpec grid = acefd::problem_grid(spec.kind, subdivisions);
    *out = new acefd_field{acefd::initial_field(spec, grid)};
    return ACEFD_OK;
  });
}

acefd_status acefd_field_clone(const acefd_field* field, acefd_field** out) {
  ACEFD_REQUIRE(field && out, "NULL argument");
  return guard([&] {
    *out = new acefd_field{field->field};
    return ACEFD_OK;
  });
}

void acefd_field_destroy(acefd_field* field) { delete field; }

size_t acefd_field_size(const acefd_field* field) {
  return field ? field->field.size() : 0;
}

int acefd_field_dim(const acefd_field* field) {
  return field ? field->field.spec().dim() : 0;
}

int acefd_field_nodes_per_axis(const acefd_field* field) {
  return field ? field->field.spec().nodes_per_axis() : 0;
}

double acefd_field_spacing(const acefd_field* field) {
  return field ? field->field.spec().spacing() : 0.0;
}

double* acefd_field_data(acefd_field* field) {
  return field ? field->field.values().data() : nullptr;
}

acefd_status acefd_field_copy_in(acefd_field* field, const double* values,
                                 size_t n) {
  ACEFD_REQUIRE(field && values, "NULL argument");
  ACEFD_REQUIRE(n == field->field.size(), "length does not match the field");
  std::memcpy(field->field.values().data(), values, n * sizeof(double));
  return ACEFD_OK;
}

acefd_status acefd_field_copy_out(const acefd_field* field, double* values,
                                  size_t n) {
  ACEFD_REQUIRE(field && values, "NULL argument");
  ACEFD_REQUIRE(n == field->field.size(), "length does not match the field");
  std::memcpy(values, field->field.values().data(), n * sizeof(double));
  return ACEFD_OK;
}

acefd_status acefd_field_max_abs(const acefd_field* field, double* out) {
  ACEFD_REQUIRE(field && out, "NULL argument");
  *out = field->field.max_abs();
  return ACEFD_OK;
}

acefd_status acefd_apply_stencil(const acefd_field* in, acefd_field* out) {
  ACEFD_REQUIRE(in && out, "NULL argument");
  ACEFD_REQUIRE(in->field.spec() == out->field.spec(),
                "fields live on different grids");
  return guard([&] {
    out->field = acefd::apply_stencil(in->field);
    return ACEFD_OK;
  });
}

acefd_status acefd_neighbor_sum(const acefd_field* field, const int* node,
                                double* out) {
  ACEFD_REQUIRE(field && node && out, "NULL argument");
  return guard([&] {
    *out = acefd::neighbor_sum(field->field, to_node(field->field.spec(), node));
    return ACEFD_OK;
  });
}

acefd_status acefd_node_coordinates(const acefd_field* field, const int* node,
                                    double* out) {
  ACEFD_REQUIRE(field && node && out, "NULL argument");
  return guard([&] {
    const auto& spec = field->field.spec();
    const acefd::Point p = acefd::node_coordinates(spec, to_node(spec, node));
    for (int a = 0; a < spec.dim(); ++a) out[a] = p[a];
    return ACEFD_OK;
  });
}

acefd_status acefd_params_derive(int dim, double omega1, double eps_interface,
                                 double dx, double dt, int allow_unsafe,
                                 acefd_params** out) {
  return make_params(false, dim, omega1, eps_interface, dx, dt, allow_unsafe,
                     out);
}

acefd_status acefd_params_from_ratio(int dim, double omega1, double eps_ratio,
                                     double dx, double dt, int allow_unsafe,
                                     acefd_params** out) {
  return make_params(true, dim, omega1, eps_ratio, dx, dt, allow_unsafe, out);
}

void acefd_params_destroy(acefd_params* params) { delete params; }

acefd_status acefd_params_get(const acefd_params* params,
                              acefd_param_values* out) {
  ACEFD_REQUIRE(params && out, "NULL argument");
  const auto& p = params->params;
  out->dim = p.dim;
  out->omega1 = p.omega1;
  out->relaxation = p.relaxation;
  out->dx = p.dx;
  out->dt = p.dt;
  out->eps_interface = p.eps_interface;
  out->eps_ratio = p.eps_ratio;
  out->lattice_speed = p.lattice_speed;
  out->unsafe = p.unsafe() ? 1 : 0;
  return ACEFD_OK;
}

acefd_status acefd_solve_cubic(double xi, double dt, double* out) {
  ACEFD_REQUIRE(out, "out is NULL");
  return guard([&] {
    *out = acefd::solve_cubic(xi, dt);
    return ACEFD_OK;
  });
}

acefd_status acefd_step(const acefd_field* in, acefd_field* out,
                        const acefd_params* params,
                        acefd_step_report* report) {
  ACEFD_REQUIRE(in && out && params, "NULL argument");
  ACEFD_REQUIRE(in->field.spec() == out->field.spec(),
                "fields live on different grids");
  ACEFD_REQUIRE(in->field.spec().dim() == params->params.dim,
                "parameter dimension does not match the grid");
  return guard([&] {
    acefd::ScalarField next(in->field.spec());
    const acefd::StepReport r = acefd::step(in->field, next, params->params);
    out->field = std::move(next);
    if (report) {
      report->max_abs = r.max_abs;
      report->xi_min = r.xi_min;
      report->xi_max = r.xi_max;
      report->max_residual = r.max_residual;
      report->newton_fallback_count = r.newton_fallback_count;
    }
    return ACEFD_OK;
  });
}

acefd_status acefd_fex_step(acefd_field* field, const acefd_params* params) {
  ACEFD_REQUIRE(field && params, "NULL argument");
  return guard([&] {
    field->field = acefd::baselines::fex_fd_step(field->field, params->params);
    return ACEFD_OK;
  });
}

acefd_status acefd_cn_step(acefd_field* field, const acefd_params* params,
                           double newton_tol, int max_iterations) {
  ACEFD_REQUIRE(field && params, "NULL argument");
  ACEFD_REQUIRE(newton_tol > 0.0 && max_iterations > 0,
                "newton_tol and max_iterations must be positive");
  return guard([&] {
    acefd::baselines::NewtonOptions opt;
    opt.tolerance = newton_tol;
    opt.max_iterations = max_iterations;
    field->field =
        acefd::baselines::cn_step(field->field, params->params, opt);
    return ACEFD_OK;
  });
}

acefd_status acefd_kinetic_run(acefd_field* field, const acefd_params* params,
                               int steps) {
  ACEFD_REQUIRE(field && params, "NULL argument");
  ACEFD_REQUIRE(steps >= 0, "steps must be non-negative");
  return guard([&] {
    const acefd::kinetic::LatticeModel model(params->params);
    auto dist = acefd::kinetic::equilibrium_field(field->field, model);
    for (int n = 0; n < steps; ++n) {
      dist = acefd::kinetic::kinetic_step(dist, params->params, model);
    }
    field->field = acefd::kinetic::moment_phi(dist);
    return ACEFD_OK;
  });
}

acefd_status acefd_energy(const acefd_field* field, const acefd_params* params,
                          double* out) {
  ACEFD_REQUIRE(field && params && out, "NULL argument");
  return guard([&] {
    *out = acefd::discrete_energy(field->field, params->params);
    return ACEFD_OK;
  });
}

acefd_status acefd_error_norms(const acefd_field* numeric,
                               const acefd_field* reference, double* err_inf,
                               double* err_l2, double* err_rms) {
  ACEFD_REQUIRE(numeric && reference, "NULL argument");
  return guard([&] {
    const auto e = acefd::error_norms(numeric->field, reference->field);
    if (err_inf) *err_inf = e.err_inf;
    if (err_l2) *err_l2 = e.err_l2;
    if (err_rms) *err_rms = e.err_rms;
    return ACEFD_OK;
  });
}

acefd_status acefd_energy_matrix_check(const acefd_params* params,
                                  const acefd_field* grid,
                                  int* positive_definite,
                                  int* dominance_condition) {
  ACEFD_REQUIRE(params && grid, "NULL argument");
  return guard([&] {
    const auto v =
        acefd::check_energy_matrix(params->params, grid->field.spec());
    if (positive_definite) *positive_definite = v.positive_definite ? 1 : 0;
    if (dominance_condition) {
      *dominance_condition = v.dominance_condition ? 1 : 0;
    }
    return ACEFD_OK;
  });
}

acefd_status acefd_extract_radius(const acefd_field* field, double* out) {
  ACEFD_REQUIRE(field && out, "NULL argument");
  return guard([&] {
    *out = acefd::extract_radius(field->field);
    return ACEFD_OK;
  });
}

acefd_status acefd_config_load(const char* path, acefd_config** out) {
  ACEFD_REQUIRE(path && out, "NULL argument");
  return guard([&] {
    *out = new acefd_config{acefd::Config::load(path)};
    return ACEFD_OK;
  });
}

acefd_status acefd_config_parse(const char* text, acefd_config** out) {
  ACEFD_REQUIRE(text && out, "NULL argument");
  return guard([&] {
    *out = new acefd_config{acefd::Config::parse(text)};
    return ACEFD_OK;
  });
}

void acefd_config_destroy(acefd_config* config) { delete config; }

acefd_status acefd_config_set(acefd_config* config, const char* key,
                              const char* value) {
  ACEFD_REQUIRE(config && key && value, "NULL argument");
  return guard([&] {
    config->config.set(key, value);
    return ACEFD_OK;
  });
}

acefd_status acefd_config_validate(const acefd_config* config) {
  ACEFD_REQUIRE(config, "NULL argument");
  return guard([&] {
    (void)acefd::make_run_config(config->config);
    return ACEFD_OK;
  });
}

acefd_status acefd_config_describe(const acefd_config* config, char* buf,
                                   size_t cap, size_t* len) {
  ACEFD_REQUIRE(config, "NULL argument");
  return guard([&] {
    const acefd::RunConfig rc = acefd::make_run_config(config->config);
    const acefd::SchemeParams p = rc.params();
    std::ostringstream out;
    out.precision(17);
    out << "problem = " << acefd::to_string(rc.problem.kind) << "\n"
        << "scheme = " << acefd::to_string(rc.scheme) << "\n"
        << "boundary = " << acefd::to_string(rc.grid().bc()) << "\n"
        << "dim = " << p.dim << "\n"
        << "subdivisions = " << rc.subdivisions << "\n"
        << "nodes_per_axis = " << rc.grid().nodes_per_axis() << "\n"
        << "dx = " << p.dx << "\n"
        << "dt = " << p.dt << "\n"
        << "t_end = " << rc.t_end << "\n"
        << "steps = " << rc.step_count() << "\n"
        << "eps_interface = " << p.eps_interface << "\n"
        << "eps_ratio = " << p.eps_ratio << "\n"
        << "omega1 = " << p.omega1 << "\n"
        << "relaxation = " << p.relaxation << "\n"
        << "lattice_speed = " << p.lattice_speed << "\n"
        << "allow_unsafe = " << (rc.allow_unsafe ? "true" : "false") << "\n";
    const std::string s = out.str();
    if (len) *len = s.size();
    if (buf && cap > 0) {
      const size_t n = s.size() < cap - 1 ? s.size() : cap - 1;
      std::memcpy(buf, s.data(), n);
      buf[n] = '\0';
    }
    return ACEFD_OK;
  });
}

acefd_status acefd_run(const acefd_config* config, acefd_run_result* result) {
  ACEFD_REQUIRE(config && result, "NULL argument");
  return guard([&] {
    const acefd::RunSummary s =
        acefd::run(acefd::make_run_config(config->config));
    fill_result(s, result);
    if (s.status != acefd::RunStatus::kOk) g_last_error = s.message;
    return result->status;
  });
}

acefd_status acefd_converge(const acefd_config* config, int levels,
                            acefd_convergence_row* rows, size_t cap,
                            size_t* count) {
  ACEFD_REQUIRE(config, "NULL argument");
  return guard([&] {
    const auto table =
        acefd::converge(acefd::make_run_config(config->config), levels);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (count) *count = table.rows.size();
    for (size_t i = 0; i < table.rows.size() && rows && i < cap; ++i) {
      const auto& r = table.rows[i];
      rows[i].subdivisions = r.subdivisions;
      rows[i].dx = r.dx;
      rows[i].dt = r.dt;
      rows[i].steps = r.steps;
      rows[i].err_inf = r.error.err_inf;
      rows[i].err_l2 = r.error.err_l2;
      rows[i].err_rms = r.error.err_rms;
      rows[i].cr_inf = r.cr_inf.value_or(nan);
      rows[i].cr_l2 = r.cr_l2.value_or(nan);
      rows[i].cr_rms = r.cr_rms.value_or(nan);
    }
    return ACEFD_OK;
  });
}

acefd_status acefd_compare(const acefd_config* const* configs, size_t n,
                           const char* output_dir, acefd_run_result* results) {
  ACEFD_REQUIRE(configs && results && n > 0, "NULL argument");
  return guard([&] {
    std::vector<acefd::RunConfig> rcs;
    for (size_t i = 0; i < n; ++i) {
      if (!configs[i]) throw acefd::InvalidArgument("NULL config in list");
      rcs.push_back(acefd::make_run_config(configs[i]->config));
    }
    const auto rows = acefd::compare(rcs, output_dir ? output_dir : "");
    for (size_t i = 0; i < rows.size(); ++i) fill_result(rows[i], &results[i]);
    return ACEFD_OK;
  });
}

}  // extern "C"
