#pragma once

// Initial data, exact solutions and interface post-processing for the
// benchmark problems.

#include <cstdint>
#include <optional>
#include <string>

#include "acefd/grid.hpp"

namespace acefd {

enum class ProblemKind {
  kTravelingWave,   // 1-D, Neumann, (-0.5, 2.5)
  kRandomHD,        // 1-D, Dirichlet, (0, 1)
  kPeriodicSine2D,  // 2-D, periodic, (0, 2 pi)^2
  kCircle2D,        // 2-D, Neumann, (-1, 1)^2
  kSphere3D,        // 3-D, Neumann, (-1, 1)^3
};

const char* to_string(ProblemKind kind) noexcept;
ProblemKind parse_problem(const std::string& text);

struct ProblemSpec {
  ProblemKind kind = ProblemKind::kTravelingWave;
  double eps_interface = 0.0;  // used by the traveling wave and the tanh fronts
  double radius0 = 0.7;
  double amplitude = 0.05;     // sine amplitude / half-width of the noise
  std::uint64_t seed = 0;
};

struct Domain {
  int dim;
  double lower;
  double length;
  Boundary bc;
};

Domain default_domain(ProblemKind kind) noexcept;
bool has_exact_solution(ProblemKind kind) noexcept;

// Grid on the problem's domain with N subdivisions per axis.
GridSpec problem_grid(ProblemKind kind, int subdivisions);

// Throws InvalidArgument when the grid's dimension, boundary condition or
// domain does not match the problem.
ScalarField initial_field(const ProblemSpec& problem, const GridSpec& spec);

// 1/2 [1 - tanh((x - s t) / (2 sqrt2 eps))], s = 3 eps / sqrt2.
double traveling_wave_exact(double x, double t, double eps_interface);
double traveling_wave_speed(double eps_interface) noexcept;

// Exact field at time t (traveling wave only).
ScalarField exact_field(const ProblemSpec& problem, const GridSpec& spec,
                        double t);

// sqrt(R0^2 - 2 (d-1) eps^2 t); empty once the radicand is negative.
std::optional<double> expected_radius(double t, double radius0,
                                      double eps_interface, int dim);
double extinction_time(double radius0, double eps_interface, int dim);

// Distance from the domain centre to the zero crossing of phi along the +x
// ray through the node row closest to the centre, linearly interpolated.
// Throws ExtinctionError when phi does not change sign along the ray.
double extract_radius(const ScalarField& field);

// splitmix64 finaliser.
std::uint64_t splitmix64(std::uint64_t x) noexcept;
// Uniform [0, 1) value for node `index` under `seed`.
double node_uniform(std::uint64_t seed, std::uint64_t index) noexcept;

}  // namespace acefd
