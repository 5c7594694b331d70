#include <doctest.h>

#include <cmath>
#include <random>

#include "acefd/diagnostics.hpp"
#include "acefd/error.hpp"
#include "acefd/grid.hpp"
#include "acefd/problems.hpp"
#include "acefd/scheme.hpp"
#include "support.hpp"

using namespace acefd;
using acefd::test::random_field;
using acefd::test::unit_grid;

namespace {

SchemeParams ratio_params(int dim, double eps, double dt, double dx = 0.1) {
  return params_from_ratio(dim, 1.0 / (2 * dim), eps, dx, dt, Safety::kUnsafe);
}

// -phi . (Lambda phi) from the assembled matrix.
double dense_quadratic_form(const ScalarField& f) {
  const auto m = assemble_stencil_matrix(f.spec());
  const std::size_t n = f.size();
  double q = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) q -= f[r] * m[r * n + c] * f[c];
  }
  return q;
}

ErrorReport rep(double dx, double e_inf, double e_l2) {
  ErrorReport r;
  r.dx = dx;
  r.err_inf = e_inf;
  r.err_l2 = e_l2;
  return r;
}

}  // namespace

TEST_CASE("discrete energy examples") {
  const auto p = ratio_params(1, 0.2, 0.3);
  SUBCASE("pure phases") {
    for (Boundary bc : {Boundary::kNeumann, Boundary::kPeriodic}) {
      for (double v : {1.0, -1.0}) {
        ScalarField f(unit_grid(1, 9, bc), v);
        CHECK(discrete_energy(f, p) == 0.0);
      }
    }
  }
  SUBCASE("zero field") {
    for (Boundary bc : {Boundary::kNeumann, Boundary::kDirichlet,
                        Boundary::kPeriodic}) {
      const auto p2 = ratio_params(2, 0.1, 0.3, 0.25);
      ScalarField f(GridSpec(2, 4, 1.0, Point{}, bc));
      const double m = static_cast<double>(f.size());
      CHECK(discrete_energy(f, p2) ==
            doctest::Approx(0.25 * 0.25 * m / 4).epsilon(1e-15));
    }
  }
  SUBCASE("alternating periodic field") {
    for (int n : {2, 4, 10}) {
      GridSpec spec(1, n, 1.0, Point{}, Boundary::kPeriodic);
      ScalarField f(spec);
      for (int i = 0; i < n; ++i) f[i] = i % 2 == 0 ? 1.0 : -1.0;
      CHECK(stencil_quadratic_form(f) == 4.0 * n);
      CHECK(dense_quadratic_form(f) == 4.0 * n);
      const double expect = spec.spacing() * (p.eps_ratio / (2 * p.dt)) * 4 * n;
      CHECK(discrete_energy(f, p) == doctest::Approx(expect).epsilon(1e-15));
    }
  }
}

TEST_CASE("quadratic form matches the assembled matrix and is non-negative") {
  for (Boundary bc : {Boundary::kNeumann, Boundary::kDirichlet,
                      Boundary::kPeriodic}) {
    for (int dim = 1; dim <= 3; ++dim) {
      for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto f = random_field(unit_grid(dim, 4, bc), seed);
        const double q = stencil_quadratic_form(f);
        CHECK(q >= -1e-12);
        CHECK(q == doctest::Approx(dense_quadratic_form(f)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("energy is invariant under grid symmetries") {
  const auto p = ratio_params(2, 0.15, 0.2);
  SUBCASE("axis reflection for Neumann and Dirichlet") {
    for (Boundary bc : {Boundary::kNeumann, Boundary::kDirichlet}) {
      const auto f = random_field(unit_grid(2, 7, bc), 4);
      const int n = f.spec().nodes_per_axis();
      ScalarField g(f.spec());
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) g.at({n - 1 - i, j, 0}) = f.at({i, j, 0});
      }
      CHECK(discrete_energy(g, p) ==
            doctest::Approx(discrete_energy(f, p)).epsilon(1e-13));
    }
  }
  SUBCASE("cyclic shift for periodic") {
    const auto f = random_field(unit_grid(2, 7, Boundary::kPeriodic), 4);
    const int n = f.spec().nodes_per_axis();
    ScalarField g(f.spec());
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) g.at({(i + 3) % n, (j + 1) % n, 0}) = f.at({i, j, 0});
    }
    CHECK(discrete_energy(g, p) ==
          doctest::Approx(discrete_energy(f, p)).epsilon(1e-13));
  }
}

TEST_CASE("energy monotonicity verdicts") {
  std::vector<EnergyRecord> flat(5, EnergyRecord{0.0, 2.0, 0.5});
  CHECK(check_energy_monotone(flat).pass);
  std::vector<EnergyRecord> down;
  for (int i = 0; i < 6; ++i) down.push_back({0.1 * i, 3.0 - i, 0.5});
  CHECK(check_energy_monotone(down).pass);
  down[4].energy = 5.0;
  const auto v = check_energy_monotone(down);
  CHECK_FALSE(v.pass);
  REQUIRE(v.first_violation.has_value());
  CHECK(*v.first_violation == 4);
  CHECK(v.worst_increase == doctest::Approx(5.0));
  CHECK(check_energy_monotone(std::vector<EnergyRecord>{}).pass);
}

TEST_CASE("energy decays along the scheme under the maximum-principle conditions") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Boundary bcs[] = {Boundary::kNeumann, Boundary::kDirichlet,
                          Boundary::kPeriodic};
  for (int trial = 0; trial < 24; ++trial) {
    const int dim = 1 + trial % 2;
    const double omega1 = (0.05 + 0.95 * u(rng)) / (2 * dim);
    const double s = 1.001 + 10 * u(rng);
    const double dt = (1 - 2 * dim * omega1 / s) * (0.05 + 0.95 * u(rng));
    const auto p = params_from_ratio(dim, omega1, omega1 / s, 0.1, dt);
    ScalarField f = random_field(unit_grid(dim, 8, bcs[trial % 3]), 100 + trial);
    std::vector<EnergyRecord> records{{0.0, discrete_energy(f, p), f.max_abs()}};
    for (int n = 1; n <= 40; ++n) {
      f = step(f, p).first;
      records.push_back({n * dt, discrete_energy(f, p), f.max_abs()});
      const double inc = records[n].energy - records[n - 1].energy;
      REQUIRE(inc <= 1e-12 * std::max(1.0, std::abs(records[n - 1].energy)));
    }
    CHECK(check_energy_monotone(records).pass);
  }
}

TEST_CASE("energy matrix examples") {
  SUBCASE("valid parameters give a positive definite matrix") {
    for (Boundary bc : {Boundary::kNeumann, Boundary::kDirichlet,
                        Boundary::kPeriodic}) {
      const auto p = params_from_ratio(2, 0.2, 0.05, 0.1, 0.7);
      const auto v = check_energy_matrix(p, unit_grid(2, 6, bc));
      CHECK(v.symmetric);
      CHECK(v.dominance_condition);
      CHECK(v.row_dominance);
      CHECK(v.positive_definite);
      CHECK(v.pass());
      REQUIRE(v.min_eigenvalue.has_value());
      CHECK(*v.min_eigenvalue > 0.0);
    }
  }
  SUBCASE("Dirichlet just past the bound fails dominance") {
    const int d = 1;
    const double eps = 0.3;
    const auto p = ratio_params(d, eps, 4 * (1 - 2 * d * eps) + 0.01);
    const auto v = check_energy_matrix(p, unit_grid(d, 8, Boundary::kDirichlet));
    CHECK_FALSE(v.dominance_condition);
    CHECK_FALSE(v.pass());
  }
  SUBCASE("periodic at the bound") {
    const int d = 1;
    const double eps = 0.3;
    const auto p = ratio_params(d, eps, 4 * (1 - 2 * d * eps));
    // Odd node count: no strict row, but still nonsingular.
    auto v = check_energy_matrix(p, unit_grid(d, 7, Boundary::kPeriodic));
    CHECK(v.dominance_condition);
    CHECK_FALSE(v.row_dominance);
    CHECK(v.pass());
    // Even node count: the alternating vector is in the kernel.
    v = check_energy_matrix(p, unit_grid(d, 8, Boundary::kPeriodic));
    CHECK(v.dominance_condition);
    CHECK_FALSE(v.positive_definite);
  }
  SUBCASE("size limit") {
    const auto p = ratio_params(3, 0.05, 0.3);
    CHECK_THROWS_AS(check_energy_matrix(p, unit_grid(3, 17, Boundary::kPeriodic)),
                    InvalidArgument);
  }
}

TEST_CASE("error norm examples") {
  const auto spec = GridSpec(2, 4, 1.0, Point{}, Boundary::kPeriodic);
  const auto a = random_field(spec, 2);
  auto e = error_norms(a, a);
  CHECK(e.err_inf == 0.0);
  CHECK(e.err_l2 == 0.0);
  CHECK(e.err_rms == 0.0);
  ScalarField b = a;
  for (std::size_t i = 0; i < b.size(); ++i) b[i] -= 0.3;
  e = error_norms(a, b);
  const double m = static_cast<double>(a.size());
  CHECK(e.err_inf == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(e.err_l2 == doctest::Approx(0.3 * std::sqrt(0.25 * 0.25 * m)).epsilon(1e-14));
  CHECK(e.err_rms == doctest::Approx(0.3 * std::sqrt(m / 25.0)).epsilon(1e-14));
  CHECK_THROWS_AS(error_norms(a, ScalarField(unit_grid(2, 5, Boundary::kPeriodic))),
                  InvalidArgument);
}

TEST_CASE("convergence rate examples") {
  auto r = convergence_rates({rep(0.1, 4e-3, 8e-3), rep(0.05, 1e-3, 2e-3)});
  CHECK_FALSE(r[0].cr_inf.has_value());
  CHECK(*r[1].cr_inf == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(*r[1].cr_l2 == doctest::Approx(2.0).epsilon(1e-14));
  r = convergence_rates({rep(0.1, 1e-3, 1e-3), rep(0.05, 1e-3, 1e-3)});
  CHECK(*r[1].cr_inf == 0.0);
  r = convergence_rates({rep(0.1, 0.0, 0.0), rep(0.05, 0.0, 0.0)});
  CHECK_FALSE(r[1].cr_inf.has_value());
  CHECK_FALSE(r[1].cr_l2.has_value());
  CHECK_THROWS_AS(convergence_rates({rep(0.1, 1, 1), rep(0.06, 1, 1)}), InvalidArgument);
  r = convergence_rates({rep(0.1, 1.0, 1.0), rep(0.08, 0.64, 0.64)}, Refinement::kAny);
  CHECK(*r[1].cr_inf == doctest::Approx(2.0).epsilon(1e-12));
  CHECK_THROWS_AS(convergence_rates({rep(0.1, 1, 1), rep(0.1, 1, 1)}, Refinement::kAny),
                  InvalidArgument);
  // Reference traveling-wave maximum errors.
  const double dx = 1.0 / 64;
  r = convergence_rates({rep(dx, 9.8980e-3, 0),
                         rep(dx / 2, 2.4823e-3, 0),
                         rep(dx / 4, 6.1411e-4, 0),
                         rep(dx / 8, 1.5323e-4, 0)});
  CHECK(*r[1].cr_inf == doctest::Approx(1.9954).epsilon(0.05 / 1.9954));
  CHECK(*r[2].cr_inf == doctest::Approx(2.0151).epsilon(0.05 / 2.0151));
  CHECK(*r[3].cr_inf == doctest::Approx(2.0027).epsilon(0.05 / 2.0027));
}

TEST_CASE("compensated summation") {
  CompensatedSum s;
  s.add(1.0);
  for (int i = 0; i < 1000; ++i) s.add(1e-16);
  s.add(-1.0);
  CHECK(s.value() == doctest::Approx(1e-13).epsilon(1e-10));
}

TEST_CASE("traveling wave maximum error at dx = 1/64") {
  const double eps = std::tanh(0.9) / (16 * std::sqrt(2.0));
  const ProblemSpec problem{ProblemKind::kTravelingWave, eps};
  const auto spec = problem_grid(ProblemKind::kTravelingWave, 192);
  const double dx = spec.spacing();
  const double dt = 5 * dx * dx;
  const auto p = derive_params(1, 1.0 / 3, eps, dx, dt);
  const double t_end = 1.0 / traveling_wave_speed(eps);
  const long steps = std::lround(t_end / dt);
  ScalarField f = initial_field(problem, spec);
  ScalarField next(spec);
  for (long n = 0; n < steps; ++n) {
    step(f, next, p);
    std::swap(f, next);
  }
  const auto e = error_norms(f, exact_field(problem, spec, t_end));
  CHECK(e.err_inf == doctest::Approx(9.8980e-3).epsilon(0.01));
  CHECK(e.err_rms == doctest::Approx(2.0477e-3).epsilon(0.02));
}
