#include "acefd/problems.hpp"

#include <cmath>
#include <numbers>

#include "acefd/error.hpp"

namespace acefd {

const char* to_string(ProblemKind kind) noexcept {
  switch (kind) {
    case ProblemKind::kTravelingWave:
      return "traveling_wave";
    case ProblemKind::kRandomHD:
      return "random_hd";
    case ProblemKind::kPeriodicSine2D:
      return "periodic_sine_2d";
    case ProblemKind::kCircle2D:
      return "circle_2d";
    case ProblemKind::kSphere3D:
      return "sphere_3d";
  }
  return "unknown";
}

ProblemKind parse_problem(const std::string& text) {
  for (auto k : {ProblemKind::kTravelingWave, ProblemKind::kRandomHD,
                 ProblemKind::kPeriodicSine2D, ProblemKind::kCircle2D,
                 ProblemKind::kSphere3D}) {
    if (text == to_string(k)) return k;
  }
  throw InvalidArgument("unknown problem '" + text + "'");
}

Domain default_domain(ProblemKind kind) noexcept {
  switch (kind) {
    case ProblemKind::kTravelingWave:
      return {1, -0.5, 3.0, Boundary::kNeumann};
    case ProblemKind::kRandomHD:
      return {1, 0.0, 1.0, Boundary::kDirichlet};
    case ProblemKind::kPeriodicSine2D:
      return {2, 0.0, 2.0 * std::numbers::pi, Boundary::kPeriodic};
    case ProblemKind::kCircle2D:
      return {2, -1.0, 2.0, Boundary::kNeumann};
    case ProblemKind::kSphere3D:
      return {3, -1.0, 2.0, Boundary::kNeumann};
  }
  return {1, 0.0, 1.0, Boundary::kNeumann};
}

bool has_exact_solution(ProblemKind kind) noexcept {
  return kind == ProblemKind::kTravelingWave;
}

GridSpec problem_grid(ProblemKind kind, int subdivisions) {
  const Domain d = default_domain(kind);
  return GridSpec(d.dim, subdivisions, d.length, {d.lower, d.lower, d.lower},
                  d.bc);
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

double node_uniform(std::uint64_t seed, std::uint64_t index) noexcept {
  const std::uint64_t bits = splitmix64(seed ^ splitmix64(index));
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

double traveling_wave_speed(double eps_interface) noexcept {
  return 3.0 * eps_interface / std::numbers::sqrt2;
}

double traveling_wave_exact(double x, double t, double eps_interface) {
  if (!(eps_interface > 0.0)) {
    throw InvalidArgument("traveling wave needs eps_interface > 0");
  }
  const double s = traveling_wave_speed(eps_interface);
  return 0.5 *
         (1.0 - std::tanh((x - s * t) / (2.0 * std::numbers::sqrt2 * eps_interface)));
}

namespace {

void require_matching_grid(const ProblemSpec& problem, const GridSpec& spec) {
  const Domain d = default_domain(problem.kind);
  const double tol = 1e-12 * std::fmax(1.0, std::fabs(d.length));
  bool ok = spec.dim() == d.dim && spec.bc() == d.bc &&
            std::fabs(spec.length() - d.length) <= tol;
  for (int a = 0; a < spec.dim() && ok; ++a) {
    ok = std::fabs(spec.origin()[a] - d.lower) <= tol;
  }
  if (!ok) {
    throw InvalidArgument(std::string("grid does not match the domain of ") +
                          to_string(problem.kind));
  }
}

double radial_tanh(const Point& p, int dim, double radius0, double eps) {
  double r2 = 0.0;
  for (int a = 0; a < dim; ++a) r2 += p[a] * p[a];
  return std::tanh((radius0 - std::sqrt(r2)) / (std::numbers::sqrt2 * eps));
}

}  // namespace

ScalarField initial_field(const ProblemSpec& problem, const GridSpec& spec) {
  require_matching_grid(problem, spec);
  ScalarField field(spec);
  const bool needs_eps = problem.kind == ProblemKind::kTravelingWave ||
                         problem.kind == ProblemKind::kCircle2D ||
                         problem.kind == ProblemKind::kSphere3D;
  if (needs_eps && !(problem.eps_interface > 0.0)) {
    throw InvalidArgument("problem needs eps_interface > 0");
  }
  for (std::size_t i = 0; i < field.size(); ++i) {
    const Point p = node_coordinates(spec, spec.unflatten(i));
    double v = 0.0;
    switch (problem.kind) {
      case ProblemKind::kTravelingWave:
        v = traveling_wave_exact(p[0], 0.0, problem.eps_interface);
        break;
      case ProblemKind::kRandomHD:
        v = problem.amplitude * (2.0 * node_uniform(problem.seed, i) - 1.0);
        break;
      case ProblemKind::kPeriodicSine2D:
        v = problem.amplitude * std::sin(p[0]) * std::sin(p[1]);
        break;
      case ProblemKind::kCircle2D:
      case ProblemKind::kSphere3D:
        v = radial_tanh(p, spec.dim(), problem.radius0, problem.eps_interface);
        break;
    }
    field[i] = v;
  }
  return field;
}

ScalarField exact_field(const ProblemSpec& problem, const GridSpec& spec,
                        double t) {
  if (!has_exact_solution(problem.kind)) {
    throw InvalidArgument(std::string("no exact solution for ") +
                          to_string(problem.kind));
  }
  require_matching_grid(problem, spec);
  ScalarField field(spec);
  for (std::size_t i = 0; i < field.size(); ++i) {
    const Point p = node_coordinates(spec, spec.unflatten(i));
    field[i] = traveling_wave_exact(p[0], t, problem.eps_interface);
  }
  return field;
}

std::optional<double> expected_radius(double t, double radius0,
                                      double eps_interface, int dim) {
  if (dim < 2 || dim > 3) throw InvalidArgument("radius law needs d = 2 or 3");
  const double r2 =
      radius0 * radius0 - 2.0 * (dim - 1) * eps_interface * eps_interface * t;
  if (r2 < 0.0) return std::nullopt;
  return std::sqrt(r2);
}

double extinction_time(double radius0, double eps_interface, int dim) {
  if (dim < 2 || dim > 3) throw InvalidArgument("radius law needs d = 2 or 3");
  return radius0 * radius0 /
         (2.0 * (dim - 1) * eps_interface * eps_interface);
}

double extract_radius(const ScalarField& field) {
  const GridSpec& spec = field.spec();
  const int n = spec.nodes_per_axis();
  Point centre{};
  for (int a = 0; a < spec.dim(); ++a) {
    centre[a] = spec.origin()[a] + 0.5 * spec.length();
  }
  // Axis coordinates do not depend on the other indices.
  auto coord = [&](int axis, int i) {
    MultiIndex idx{0, 0, 0};
    idx[axis] = i;
    return node_coordinates(spec, idx)[axis];
  };
  MultiIndex row{0, 0, 0};
  for (int a = 1; a < spec.dim(); ++a) {
    int best = 0;
    double best_dist = std::fabs(coord(a, 0) - centre[a]);
    for (int i = 1; i < n; ++i) {
      const double dist = std::fabs(coord(a, i) - centre[a]);
      if (dist <= best_dist) {
        best = i;
        best_dist = dist;
      }
      if (dist > best_dist) break;
    }
    row[a] = best;
  }
  int start = 0;
  while (start < n && coord(0, start) < centre[0]) ++start;

  double offset2 = 0.0;
  for (int a = 1; a < spec.dim(); ++a) {
    const double off = coord(a, row[a]) - centre[a];
    offset2 += off * off;
  }
  for (int i = start; i + 1 < n; ++i) {
    MultiIndex here = row;
    here[0] = i;
    MultiIndex next = row;
    next[0] = i + 1;
    const double a = field.at(here);
    const double b = field.at(next);
    double x;
    if (a == 0.0) {
      x = coord(0, i);
    } else if ((a > 0.0 && b <= 0.0) || (a < 0.0 && b >= 0.0)) {
      x = coord(0, i) + a / (a - b) * (coord(0, i + 1) - coord(0, i));
    } else {
      continue;
    }
    const double dx0 = x - centre[0];
    return std::sqrt(dx0 * dx0 + offset2);
  }
  throw ExtinctionError("no sign change along the ray from the centre");
}

}  // namespace acefd
