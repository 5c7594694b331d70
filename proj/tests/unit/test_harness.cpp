#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "acefd/config.hpp"
#include "acefd/error.hpp"
#include "acefd/harness.hpp"
#include "acefd/scheme.hpp"
#include "support.hpp"

using namespace acefd;
namespace fs = std::filesystem;

namespace {

RunConfig from_text(const std::string& text) {
  return make_run_config(Config::parse(text));
}

// Traveling wave at dx = 1/64 with eps = m dx tanh(0.9)/sqrt2.
std::string wave(int m, const std::string& dt, const std::string& t_end) {
  return "problem = traveling_wave\nsubdivisions = 192\ndt = " + dt +
         "\neps_interface = " + std::to_string(m) +
         " * dx * tanh(0.9) / sqrt(2)\nt_end = " + t_end + "\n";
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("acefd_unit_" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("status names and exit codes") {
  CHECK(exit_code(RunStatus::kOk) == 0);
  CHECK(exit_code(RunStatus::kInvariantViolated) == 3);
  CHECK(exit_code(RunStatus::kNumericFailure) == 4);
  CHECK(exit_code(RunStatus::kIterationFailure) == 4);
  CHECK(std::string(to_string(RunStatus::kOk)) == "ok");
}

TEST_CASE("traveling wave under the conditions keeps both invariants") {
  const auto rc = from_text(wave(4, "5 * dx^2", "2"));
  const auto s = run(rc);
  CHECK(s.status == RunStatus::kOk);
  CHECK(s.steps_completed == s.steps_requested);
  CHECK(s.max_principle_held);
  CHECK(s.energy_monotone);
  CHECK(s.max_abs_peak <= 1.0);
  CHECK(s.energy.size() == static_cast<std::size_t>(s.steps_requested + 1));
  REQUIRE(s.error.has_value());
  CHECK(s.error->err_inf < 0.05);
}

TEST_CASE("large time step breaks an invariant in unsafe mode") {
  auto text = wave(4, "1/5", "20");
  CHECK_THROWS_AS(from_text(text), ValidationError);
  const auto rc = from_text(text + "allow_unsafe = true\n");
  CHECK(rc.params().eps_ratio == doctest::Approx(0.8209).epsilon(1e-3));
  const auto s = run(rc);
  CHECK(s.steps_completed == s.steps_requested);
  const bool both_held = s.energy_monotone && s.max_principle_held;
  CHECK_FALSE(both_held);
}

TEST_CASE("one-step run matches one scheme step") {
  const auto rc = from_text(wave(4, "5 * dx^2", "dt"));
  const auto s = run(rc);
  REQUIRE(s.steps_completed == 1);
  REQUIRE(s.energy.size() == 2);
  const auto init = initial_field(rc.problem, rc.grid());
  const auto expect = step(init, rc.params()).first;
  for (std::size_t i = 0; i < expect.size(); ++i) {
    REQUIRE(s.final_field[i] == expect[i]);
  }
  CHECK(s.energy[1].t == rc.dt);
  CHECK(s.energy[1].energy <= s.energy[0].energy);
}

TEST_CASE("validated run stops on an out-of-range start") {
  const auto rc = from_text(
      "problem = random_hd\nsubdivisions = 32\ndt = 0.5\n"
      "eps_ratio = 0.1\nt_end = 5\namplitude = 3\nseed = 4\n");
  const auto s = run(rc);
  CHECK(s.status == RunStatus::kInvariantViolated);
  CHECK(s.steps_completed == 0);
  CHECK_FALSE(s.message.empty());
}

TEST_CASE("explicit blow-up is a numeric failure") {
  const auto rc = from_text(
      "problem = traveling_wave\nscheme = fex_fd\nsubdivisions = 96\n"
      "eps_ratio = 0.6\ndt = 1\nt_end = 200\nomega1 = 1/2\n"
      "allow_unsafe = true\n");
  const auto s = run(rc);
  CHECK(s.status == RunStatus::kNumericFailure);
  CHECK_FALSE(s.max_principle_held);
  CHECK(s.steps_completed < s.steps_requested);
}

TEST_CASE("outputs are reproducible byte for byte") {
  const std::string text =
      "problem = random_hd\nsubdivisions = 64\ndt = 0.001\n"
      "eps_interface = 0.01\nt_end = 0.05\nseed = 77\n"
      "snapshot_times = 0, 0.02, t_end\n";
  const auto a = scratch("repro_a");
  const auto b = scratch("repro_b");
  auto rc = from_text(text);
  rc.output_dir = a.string();
  run(rc);
  rc.output_dir = b.string();
  run(rc);
  for (const char* name : {"energy.csv", "final.csv", "snapshot_00000000.csv",
                           "snapshot_00000020.csv", "snapshot_00000050.csv"}) {
    CAPTURE(name);
    REQUIRE(fs::exists(a / name));
    CHECK(slurp(a / name) == slurp(b / name));
  }
  CHECK(fs::exists(a / "summary.json"));
  const std::string energy = slurp(a / "energy.csv");
  CHECK(energy.rfind("step,t,energy,max_abs\n", 0) == 0);
  CHECK(slurp(a / "final.csv").rfind("i,x,phi\n", 0) == 0);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("energy stride thins the CSV but keeps the last row") {
  const auto dir = scratch("stride");
  auto rc = from_text(
      "problem = random_hd\nsubdivisions = 16\ndt = 0.001\n"
      "eps_interface = 0.01\nt_end = 0.010\nenergy_stride = 4\n");
  rc.output_dir = dir.string();
  run(rc);
  std::istringstream in(slurp(dir / "energy.csv"));
  std::string line;
  std::vector<std::string> steps;
  std::getline(in, line);
  while (std::getline(in, line)) steps.push_back(line.substr(0, line.find(',')));
  CHECK(steps == std::vector<std::string>{"0", "4", "8", "10"});
  fs::remove_all(dir);
}

TEST_CASE("curvature runs record the radius") {
  auto rc = from_text(
      "problem = circle_2d\nsubdivisions = 32\ndt = 1/100\n"
      "eps_interface = 5 * dx * tanh(0.9) / sqrt(2)\nt_end = 1\n");
  const auto dir = scratch("radius");
  rc.output_dir = dir.string();
  const auto s = run(rc);
  REQUIRE(s.radius.size() == 101);
  REQUIRE(s.radius.back().radius.has_value());
  CHECK(std::abs(*s.radius.back().radius - *s.radius.back().expected) <
        2 * rc.dx());
  CHECK(slurp(dir / "radius.csv").rfind("t,radius,expected\n", 0) == 0);
  fs::remove_all(dir);
}

TEST_CASE("binary snapshots round-trip") {
  const auto dir = scratch("binary");
  const auto spec = acefd::test::unit_grid(3, 5, Boundary::kNeumann);
  const auto f = acefd::test::random_field(spec, 9);
  const auto path = (dir / "f.bin").string();
  write_snapshot_binary(path, f);
  CHECK(fs::file_size(path) == 16 + 8 * f.size());
  const std::string bytes = slurp(path);
  CHECK(bytes.substr(0, 4) == "ACEF");
  CHECK(bytes[4] == 3);
  CHECK(bytes[8] == 7);
  const auto g = read_snapshot_binary(path, spec);
  for (std::size_t i = 0; i < f.size(); ++i) REQUIRE(g[i] == f[i]);
  CHECK_THROWS_AS(
      read_snapshot_binary(path, acefd::test::unit_grid(3, 4, Boundary::kNeumann)),
      IoError);
  fs::remove_all(dir);
}

TEST_CASE("sample_onto") {
  SUBCASE("coincident nodes are copied") {
    const auto coarse = problem_grid(ProblemKind::kPeriodicSine2D, 10);
    const auto fine_spec = problem_grid(ProblemKind::kPeriodicSine2D, 40);
    const auto fine = acefd::test::random_field(fine_spec, 1);
    const auto s = sample_onto(fine, coarse);
    for (int i = 0; i < 10; ++i) {
      for (int j = 0; j < 10; ++j) {
        REQUIRE(s.at({i, j, 0}) == fine.at({4 * i, 4 * j, 0}));
      }
    }
  }
  SUBCASE("multilinear functions are reproduced") {
    const auto coarse = problem_grid(ProblemKind::kCircle2D, 10);
    const auto fine_spec = problem_grid(ProblemKind::kCircle2D, 30);
    ScalarField fine(fine_spec);
    auto g = [](const Point& p) { return 0.3 + 0.5 * p[0] - 0.2 * p[1] + 0.1 * p[0] * p[1]; };
    for (std::size_t i = 0; i < fine.size(); ++i) {
      fine[i] = g(node_coordinates(fine_spec, fine_spec.unflatten(i)));
    }
    const auto s = sample_onto(fine, coarse);
    // Interior coarse nodes lie inside the fine node hull.
    for (int i = 1; i < 11; ++i) {
      for (int j = 1; j < 11; ++j) {
        const Point p = node_coordinates(coarse, {i, j, 0});
        REQUIRE(s.at({i, j, 0}) == doctest::Approx(g(p)).epsilon(1e-13));
      }
    }
  }
}

TEST_CASE("steady state convergence has zero errors and no rates") {
  const auto rc = from_text(
      "problem = random_hd\nsubdivisions = 8\ndt = 0.001\n"
      "eps_interface = 0.01\nt_end = 0.01\namplitude = 0\n");
  const auto table = converge(rc, 3);
  CHECK(table.reference == "finest_level");
  REQUIRE(table.rows.size() == 2);
  for (const auto& r : table.rows) {
    CHECK(r.error.err_inf == 0.0);
    CHECK(r.error.err_l2 == 0.0);
  }
  CHECK_FALSE(table.rows[1].cr_inf.has_value());
  CHECK_FALSE(table.rows[1].cr_l2.has_value());
  CHECK(table.rows[1].dt == doctest::Approx(0.00025));
  CHECK_THROWS_AS(converge(rc, 1), ConfigError);
}

TEST_CASE("traveling wave convergence is second order") {
  const auto dir = scratch("converge");
  auto rc = from_text(
      "problem = traveling_wave\nsubdivisions = 96\ndt = 5 * dx^2\n"
      "eps_interface = tanh(0.9) / (16 * sqrt(2))\nt_end = 1\n");
  rc.output_dir = dir.string();
  const auto table = converge(rc, 3);
  CHECK(table.reference == "exact");
  REQUIRE(table.rows.size() == 3);
  for (std::size_t k = 1; k < 3; ++k) {
    REQUIRE(table.rows[k].cr_inf.has_value());
    CHECK(*table.rows[k].cr_inf > 1.8);
    CHECK(*table.rows[k].cr_inf < 2.2);
  }
  CHECK(slurp(dir / "convergence.csv")
            .rfind("subdivisions,dx,dt,steps,err_inf,err_l2,err_rms,cr_inf,"
                   "cr_l2,cr_rms\n", 0) == 0);
  fs::remove_all(dir);
}

TEST_CASE("comparing a scheme with itself") {
  const auto dir = scratch("compare");
  auto rc = from_text(wave(4, "5 * dx^2", "0.5"));
  rc.label = "a";
  auto rc2 = rc;
  rc2.label = "b";
  const auto rows = compare({rc, rc2}, dir.string());
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].error->err_inf == rows[1].error->err_inf);
  CHECK(rows[0].energy.back().energy == rows[1].energy.back().energy);
  CHECK(fs::exists(dir / "0_a" / "energy.csv"));
  CHECK(fs::exists(dir / "1_b" / "energy.csv"));
  std::istringstream in(slurp(dir / "compare.csv"));
  std::string header, l1, l2;
  std::getline(in, header);
  std::getline(in, l1);
  std::getline(in, l2);
  CHECK(l1.substr(l1.find(',')) == l2.substr(l2.find(',')));
  auto other = rc;
  other.subdivisions = 96;
  CHECK_THROWS_AS(compare({rc, other}, ""), ConfigError);
  fs::remove_all(dir);
}
