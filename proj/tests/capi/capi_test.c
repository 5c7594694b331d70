/* Exercises the C interface from plain C. */
#include <math.h>
#include <stdio.h>
#include <string.h>

#include "acefd/acefd.h"

static int failures = 0;

#define CHECK(cond)                                                  \
  do {                                                               \
    if (!(cond)) {                                                   \
      fprintf(stderr, "%s:%d: CHECK(%s) failed (%s)\n", __FILE__,    \
              __LINE__, #cond, acefd_last_error());                  \
      ++failures;                                                    \
    }                                                                \
  } while (0)

static void test_fields(void) {
  acefd_field* f = NULL;
  double v[3] = {1.0, 1.0, 1.0};
  double out[3];
  int node[1] = {0};
  double sum = 0.0, x = 0.0, m = 0.0;

  CHECK(acefd_field_create(1, 4, 1.0, NULL, ACEFD_BC_DIRICHLET, &f) == ACEFD_OK);
  CHECK(acefd_field_size(f) == 3);
  CHECK(acefd_field_nodes_per_axis(f) == 3);
  CHECK(acefd_field_dim(f) == 1);
  CHECK(acefd_field_spacing(f) == 0.25);
  CHECK(acefd_field_copy_in(f, v, 3) == ACEFD_OK);
  CHECK(acefd_field_copy_in(f, v, 2) == ACEFD_E_ARGUMENT);
  CHECK(acefd_apply_stencil(f, f) == ACEFD_OK);
  CHECK(acefd_field_copy_out(f, out, 3) == ACEFD_OK);
  CHECK(out[0] == -1.0 && out[1] == 0.0 && out[2] == -1.0);
  CHECK(acefd_field_max_abs(f, &m) == ACEFD_OK && m == 1.0);
  CHECK(acefd_neighbor_sum(f, node, &sum) == ACEFD_OK && sum == 0.0);
  CHECK(acefd_node_coordinates(f, node, &x) == ACEFD_OK && x == 0.25);
  node[0] = 3;
  CHECK(acefd_neighbor_sum(f, node, &sum) == ACEFD_E_INDEX);
  CHECK(strlen(acefd_last_error()) > 0);
  acefd_field_destroy(f);
  acefd_field_destroy(NULL);

  CHECK(acefd_field_create(5, 4, 1.0, NULL, ACEFD_BC_PERIODIC, &f) ==
        ACEFD_E_ARGUMENT);
  CHECK(acefd_field_create(1, 4, 1.0, NULL, ACEFD_BC_PERIODIC, NULL) ==
        ACEFD_E_ARGUMENT);
}

static void test_scheme(void) {
  acefd_params* p = NULL;
  acefd_param_values pv;
  acefd_field* f = NULL;
  acefd_field* g = NULL;
  acefd_step_report rep;
  double root = 0.0, e0 = 0.0, e1 = 0.0;
  int pd = 0, dom = 0;

  CHECK(acefd_solve_cubic(0.0, 0.5, &root) == ACEFD_OK && root == 0.0);
  CHECK(acefd_solve_cubic(0.44375, 0.5, &root) == ACEFD_OK);
  CHECK(fabs(root * root * root + 3 * root - 1.775) < 1e-12);
  CHECK(acefd_solve_cubic(0.1, 2.5, &root) == ACEFD_E_ARGUMENT);

  CHECK(acefd_params_from_ratio(1, 1.0 / 3, 0.45, 1.0 / 32, 0.2, 0, &p) ==
        ACEFD_E_VALIDATION);
  CHECK(p == NULL);
  CHECK(acefd_params_from_ratio(1, 1.0 / 3, 0.45, 1.0 / 32, 0.2, 1, &p) ==
        ACEFD_OK);
  CHECK(acefd_params_get(p, &pv) == ACEFD_OK && pv.unsafe == 1);
  acefd_params_destroy(p);

  CHECK(acefd_params_derive(2, 0.0, 0.05, 1.0 / 32, 0.01, 0, &p) == ACEFD_OK);
  CHECK(acefd_params_get(p, &pv) == ACEFD_OK);
  CHECK(fabs(pv.omega1 - 0.2) < 1e-15);
  CHECK(fabs(pv.eps_ratio - 0.05 * 0.05 * 0.01 * 1024) < 1e-15);

  CHECK(acefd_field_create_problem("circle_2d", 64, 0.05, 0.7, 0.0, 0, &f) ==
        ACEFD_OK);
  CHECK(acefd_field_clone(f, &g) == ACEFD_OK);
  CHECK(acefd_energy(f, p, &e0) == ACEFD_OK);
  CHECK(acefd_step(f, f, p, &rep) == ACEFD_OK);
  CHECK(rep.max_abs <= 1.0);
  CHECK(rep.max_residual <= 1e-12);
  CHECK(acefd_energy(f, p, &e1) == ACEFD_OK && e1 <= e0);
  CHECK(acefd_kinetic_run(g, p, 1) == ACEFD_OK);
  {
    double ei = 0, e2 = 0, er = 0;
    CHECK(acefd_error_norms(f, g, &ei, &e2, &er) == ACEFD_OK);
    CHECK(ei < 1e-12);
  }
  {
    double r = 0.0;
    CHECK(acefd_extract_radius(f, &r) == ACEFD_OK && fabs(r - 0.7) < 1.0 / 16);
  }
  acefd_field_destroy(f);
  acefd_field_destroy(g);

  CHECK(acefd_field_create(2, 8, 1.0, NULL, ACEFD_BC_NEUMANN, &f) == ACEFD_OK);
  CHECK(acefd_energy_matrix_check(p, f, &pd, &dom) == ACEFD_OK && pd && dom);
  CHECK(acefd_fex_step(f, p) == ACEFD_OK);
  CHECK(acefd_cn_step(f, p, 1e-12, 20) == ACEFD_OK);
  acefd_field_destroy(f);
  CHECK(acefd_field_create(2, 8, 1.0, NULL, ACEFD_BC_NEUMANN, &f) == ACEFD_OK);
  {
    double* d = acefd_field_data(f);
    size_t i;
    for (i = 0; i < acefd_field_size(f); ++i) d[i] = -1.0;
    CHECK(acefd_extract_radius(f, &root) == ACEFD_E_EXTINCTION);
  }
  acefd_field_destroy(f);
  acefd_params_destroy(p);
}

static void test_config(void) {
  const char* text =
      "problem = traveling_wave\n"
      "subdivisions = 48\n"
      "dt = 5 * dx^2\n"
      "eps_interface = tanh(0.9) / (4 * sqrt(2))\n"
      "t_end = 1\n";
  acefd_config* c = NULL;
  acefd_config* c2 = NULL;
  acefd_run_result r;
  acefd_convergence_row rows[3];
  acefd_run_result pair[2];
  const acefd_config* both[2];
  size_t count = 0, len = 0;
  char buf[4096];

  CHECK(acefd_config_parse("nonsense", &c) == ACEFD_E_CONFIG);
  CHECK(acefd_config_load("/nonexistent/x.cfg", &c) == ACEFD_E_IO);
  CHECK(acefd_config_parse(text, &c) == ACEFD_OK);
  CHECK(acefd_config_validate(c) == ACEFD_OK);
  CHECK(acefd_config_describe(c, buf, sizeof buf, &len) == ACEFD_OK);
  CHECK(len > 0 && strstr(buf, "problem") != NULL);
  CHECK(acefd_config_set(c, "colour", "red") == ACEFD_E_CONFIG);

  CHECK(acefd_run(c, &r) == ACEFD_OK);
  CHECK(r.status == ACEFD_OK);
  CHECK(r.steps_completed == r.steps_requested);
  CHECK(r.max_principle_held && r.energy_monotone);
  CHECK(r.has_error && r.err_inf < 1e-2);

  CHECK(acefd_config_set(c, "subdivisions", "96") == ACEFD_OK);
  CHECK(acefd_config_set(c, "eps_interface", "tanh(0.9) / (16 * sqrt(2))") ==
        ACEFD_OK);
  CHECK(acefd_converge(c, 3, rows, 3, &count) == ACEFD_OK && count == 3);
  CHECK(isnan(rows[0].cr_inf));
  CHECK(rows[2].cr_inf > 1.8 && rows[2].cr_inf < 2.2);
  CHECK(acefd_config_set(c, "subdivisions", "48") == ACEFD_OK);
  CHECK(acefd_config_set(c, "eps_interface", "tanh(0.9) / (4 * sqrt(2))") ==
        ACEFD_OK);

  CHECK(acefd_config_parse(text, &c2) == ACEFD_OK);
  CHECK(acefd_config_set(c2, "scheme", "fex_fd") == ACEFD_OK);
  both[0] = c;
  both[1] = c2;
  CHECK(acefd_compare(both, 2, NULL, pair) == ACEFD_OK);
  CHECK(pair[0].status == ACEFD_OK && pair[1].status == ACEFD_OK);

  CHECK(acefd_config_set(c, "dt", "1/5") == ACEFD_OK);
  CHECK(acefd_config_validate(c) == ACEFD_E_VALIDATION);
  CHECK(acefd_config_set(c, "allow_unsafe", "true") == ACEFD_OK);
  CHECK(acefd_config_validate(c) == ACEFD_OK);
  CHECK(acefd_config_set(c, "t_end", "40") == ACEFD_OK);
  CHECK(acefd_run(c, &r) == ACEFD_OK);
  CHECK(!(r.max_principle_held && r.energy_monotone));

  acefd_config_destroy(c);
  acefd_config_destroy(c2);
}

int main(void) {
  CHECK(strlen(acefd_version()) > 0);
  CHECK(strcmp(acefd_status_string(ACEFD_E_NUMERIC), "") != 0);
  test_fields();
  test_scheme();
  test_config();
  if (failures) {
    fprintf(stderr, "%d check(s) failed\n", failures);
    return 1;
  }
  printf("capi: all checks passed\n");
  return 0;
}
