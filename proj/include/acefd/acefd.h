/* C interface to the acefd Allen-Cahn solver library.
 *
 * All objects are opaque handles owned by the caller and released with the
 * matching *_destroy function (which accepts NULL). Every fallible call
 * returns an acefd_status; on failure acefd_last_error() describes the
 * problem. The message buffer is thread-local and valid until the next
 * failing call on the same thread.
 */
#ifndef ACEFD_ACEFD_H
#define ACEFD_ACEFD_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(ACEFD_BUILDING)
#define ACEFD_API __attribute__((visibility("default")))
#else
#define ACEFD_API
#endif

typedef enum acefd_status {
  ACEFD_OK = 0,
  ACEFD_E_ARGUMENT = 1,
  ACEFD_E_CONFIG = 2,
  ACEFD_E_INVARIANT = 3,
  ACEFD_E_NUMERIC = 4,
  ACEFD_E_IO = 5,
  ACEFD_E_INDEX = 6,
  ACEFD_E_VALIDATION = 7,
  ACEFD_E_ITERATION = 8,
  ACEFD_E_EXTINCTION = 9,
  ACEFD_E_INTERNAL = 10
} acefd_status;

typedef enum acefd_boundary {
  ACEFD_BC_NEUMANN = 0,
  ACEFD_BC_DIRICHLET = 1,
  ACEFD_BC_PERIODIC = 2
} acefd_boundary;

typedef struct acefd_field acefd_field;
typedef struct acefd_params acefd_params;
typedef struct acefd_config acefd_config;

typedef struct acefd_param_values {
  int dim;
  double omega1;
  double relaxation;
  double dx;
  double dt;
  double eps_interface;
  double eps_ratio;
  double lattice_speed;
  int unsafe;
} acefd_param_values;

typedef struct acefd_step_report {
  double max_abs;
  double xi_min;
  double xi_max;
  double max_residual;
  long newton_fallback_count;
} acefd_step_report;

typedef struct acefd_run_result {
  acefd_status status; /* ACEFD_OK, _E_INVARIANT, _E_NUMERIC or _E_ITERATION */
  long steps_requested;
  long steps_completed;
  double t_final;
  double max_abs_peak;
  int max_principle_held;
  int energy_monotone;
  double energy_initial;
  double energy_final;
  int has_error; /* err_* valid only when nonzero */
  double err_inf;
  double err_l2;
  double err_rms;
  double wall_seconds;
} acefd_run_result;

/* Absent convergence rates are NaN. */
typedef struct acefd_convergence_row {
  int subdivisions;
  double dx;
  double dt;
  long steps;
  double err_inf;
  double err_l2;
  double err_rms;
  double cr_inf;
  double cr_l2;
  double cr_rms;
} acefd_convergence_row;

ACEFD_API const char* acefd_version(void);
ACEFD_API const char* acefd_last_error(void);
ACEFD_API const char* acefd_status_string(acefd_status status);

/* ---- fields ---------------------------------------------------------- */

/* origin may be NULL (all zeros); otherwise it holds `dim` values. */
ACEFD_API acefd_status acefd_field_create(int dim, int subdivisions,
                                          double length, const double* origin,
                                          acefd_boundary bc,
                                          acefd_field** out);
/* Initial data of a named problem ("traveling_wave", "random_hd",
 * "periodic_sine_2d", "circle_2d", "sphere_3d") on its own domain. */
ACEFD_API acefd_status acefd_field_create_problem(
    const char* problem, int subdivisions, double eps_interface,
    double radius0, double amplitude, uint64_t seed, acefd_field** out);
ACEFD_API acefd_status acefd_field_clone(const acefd_field* field,
                                         acefd_field** out);
ACEFD_API void acefd_field_destroy(acefd_field* field);

ACEFD_API size_t acefd_field_size(const acefd_field* field);
ACEFD_API int acefd_field_dim(const acefd_field* field);
ACEFD_API int acefd_field_nodes_per_axis(const acefd_field* field);
ACEFD_API double acefd_field_spacing(const acefd_field* field);
/* Row-major storage, last axis fastest. Valid while the field lives. */
ACEFD_API double* acefd_field_data(acefd_field* field);
ACEFD_API acefd_status acefd_field_copy_in(acefd_field* field,
                                           const double* values, size_t n);
ACEFD_API acefd_status acefd_field_copy_out(const acefd_field* field,
                                            double* values, size_t n);
ACEFD_API acefd_status acefd_field_max_abs(const acefd_field* field,
                                           double* out);

/* out must live on the same grid; in == out is allowed. */
ACEFD_API acefd_status acefd_apply_stencil(const acefd_field* in,
                                           acefd_field* out);
/* node holds `dim` indices. */
ACEFD_API acefd_status acefd_neighbor_sum(const acefd_field* field,
                                          const int* node, double* out);
/* out receives `dim` coordinates. */
ACEFD_API acefd_status acefd_node_coordinates(const acefd_field* field,
                                              const int* node, double* out);

/* ---- parameters ------------------------------------------------------ */

/* omega1 <= 0 selects the default weight for the dimension. Without
 * allow_unsafe a violated maximum-principle condition gives
 * ACEFD_E_VALIDATION. */
ACEFD_API acefd_status acefd_params_derive(int dim, double omega1,
                                           double eps_interface, double dx,
                                           double dt, int allow_unsafe,
                                           acefd_params** out);
ACEFD_API acefd_status acefd_params_from_ratio(int dim, double omega1,
                                               double eps_ratio, double dx,
                                               double dt, int allow_unsafe,
                                               acefd_params** out);
ACEFD_API void acefd_params_destroy(acefd_params* params);
ACEFD_API acefd_status acefd_params_get(const acefd_params* params,
                                        acefd_param_values* out);

/* ---- time stepping --------------------------------------------------- */

ACEFD_API acefd_status acefd_solve_cubic(double xi, double dt, double* out);
/* report may be NULL; in == out is allowed. */
ACEFD_API acefd_status acefd_step(const acefd_field* in, acefd_field* out,
                                  const acefd_params* params,
                                  acefd_step_report* report);
ACEFD_API acefd_status acefd_fex_step(acefd_field* field,
                                      const acefd_params* params);
ACEFD_API acefd_status acefd_cn_step(acefd_field* field,
                                     const acefd_params* params,
                                     double newton_tol, int max_iterations);
/* `steps` kinetic steps from the equilibrium populations of `field`; the
 * zeroth moment is written back. */
ACEFD_API acefd_status acefd_kinetic_run(acefd_field* field,
                                         const acefd_params* params,
                                         int steps);

/* ---- diagnostics ----------------------------------------------------- */

ACEFD_API acefd_status acefd_energy(const acefd_field* field,
                                    const acefd_params* params, double* out);
ACEFD_API acefd_status acefd_error_norms(const acefd_field* numeric,
                                         const acefd_field* reference,
                                         double* err_inf, double* err_l2,
                                         double* err_rms);
ACEFD_API acefd_status acefd_energy_matrix_check(const acefd_params* params,
                                            const acefd_field* grid,
                                            int* positive_definite,
                                            int* dominance_condition);
/* ACEFD_E_EXTINCTION when phi has no sign change along the ray. */
ACEFD_API acefd_status acefd_extract_radius(const acefd_field* field,
                                            double* out);

/* ---- configuration and experiments ----------------------------------- */

ACEFD_API acefd_status acefd_config_load(const char* path,
                                         acefd_config** out);
ACEFD_API acefd_status acefd_config_parse(const char* text,
                                          acefd_config** out);
ACEFD_API void acefd_config_destroy(acefd_config* config);
ACEFD_API acefd_status acefd_config_set(acefd_config* config, const char* key,
                                        const char* value);
/* Full validation including the scheme's parameter conditions. */
ACEFD_API acefd_status acefd_config_validate(const acefd_config* config);
/* Resolved settings as "key = value" lines. Copies at most cap bytes
 * (NUL-terminated) and stores the full length, without the NUL, in *len. */
ACEFD_API acefd_status acefd_config_describe(const acefd_config* config,
                                             char* buf, size_t cap,
                                             size_t* len);

/* Returns the run outcome (also stored in result->status) once the run has
 * executed, or a configuration / I/O status if it could not start. */
ACEFD_API acefd_status acefd_run(const acefd_config* config,
                                 acefd_run_result* result);
/* Writes min(levels, cap) rows; *count receives the number of rows. */
ACEFD_API acefd_status acefd_converge(const acefd_config* config, int levels,
                                      acefd_convergence_row* rows, size_t cap,
                                      size_t* count);
/* results holds n entries. Failed runs do not stop the comparison. */
ACEFD_API acefd_status acefd_compare(const acefd_config* const* configs,
                                     size_t n, const char* output_dir,
                                     acefd_run_result* results);

#ifdef __cplusplus
}
#endif

#endif /* ACEFD_ACEFD_H */
