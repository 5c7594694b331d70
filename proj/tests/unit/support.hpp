#pragma once
// Shared helpers for the unit tests.
#include <cstdint>
#include <random>
#include <vector>

#include "acefd/grid.hpp"

namespace acefd::test {

inline GridSpec unit_grid(int dim, int n, Boundary bc, double length = 1.0) {
  return GridSpec(dim, n, length, Point{}, bc);
}

inline ScalarField random_field(const GridSpec& spec, std::uint64_t seed,
                                double amplitude = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-amplitude, amplitude);
  ScalarField f(spec);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = u(rng);
  return f;
}

inline double max_diff(const ScalarField& a, const ScalarField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] > b[i] ? a[i] - b[i] : b[i] - a[i];
    if (d > m) m = d;
  }
  return m;
}

}  // namespace acefd::test
