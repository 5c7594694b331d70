#pragma once

// Regularized lattice Boltzmann evolution on the DdQ(2d+1) lattice. Velocity
// 0 is at rest, velocity k (1..d) moves +c along axis k-1 and velocity k+d
// moves -c along the same axis. Equilibrium f_k^eq = w_k phi, source
// F_k = -w_k f(phi), regularized non-equilibrium from the first-order moment
// Pi = -dt c_s^2 grad(phi) / s with one-sided gradients.
//
// This path carries 2d+1 populations per node. Its zeroth moment follows the
// macroscopic scheme in scheme.hpp, which makes it a cross-check for it.

#include <array>
#include <span>
#include <vector>

#include "acefd/grid.hpp"
#include "acefd/scheme.hpp"

namespace acefd::kinetic {

inline constexpr int kMaxVelocities = 2 * kMaxDim + 1;

class LatticeModel {
 public:
  LatticeModel(int dim, double omega1, double lattice_speed);
  explicit LatticeModel(const SchemeParams& params)
      : LatticeModel(params.dim, params.omega1, params.lattice_speed) {}

  int dim() const noexcept { return dim_; }
  int velocity_count() const noexcept { return 2 * dim_ + 1; }
  double weight(int k) const noexcept { return weights_[k]; }
  // Component of velocity k along `axis`.
  double velocity(int k, int axis) const noexcept;
  // Axis (0-based) and sign of velocity k; k = 0 returns {-1, 0}.
  std::pair<int, int> direction(int k) const noexcept;
  double lattice_speed() const noexcept { return speed_; }
  double sound_speed_sq() const noexcept {
    return 2.0 * weights_[1] * speed_ * speed_;
  }

 private:
  int dim_;
  double speed_;
  std::array<double, kMaxVelocities> weights_{};
};

std::vector<double> equilibrium(double phi, const LatticeModel& model);

// Populations stored node-major: value (node, k) at node * q + k.
class DistributionField {
 public:
  DistributionField(GridSpec spec, int velocity_count);

  const GridSpec& spec() const noexcept { return spec_; }
  int velocity_count() const noexcept { return q_; }
  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }
  double& operator()(std::size_t node, int k) noexcept {
    return data_[node * q_ + k];
  }
  double operator()(std::size_t node, int k) const noexcept {
    return data_[node * q_ + k];
  }

 private:
  GridSpec spec_;
  int q_;
  std::vector<double> data_;
};

DistributionField equilibrium_field(const ScalarField& phi,
                                    const LatticeModel& model);

ScalarField moment_phi(const DistributionField& dist);

// One-sided directional gradient. `direction` > 0 gives the forward
// difference evaluated at the plus-neighbour, (phi(x+e) - phi(x)) / dx;
// otherwise the backward difference at the minus-neighbour,
// (phi(x) - phi(x-e)) / dx. Off-grid values follow neighbor_value.
double gradient_upwind(const ScalarField& field, const MultiIndex& node,
                       int axis, int direction);

struct KineticReport {
  StepReport step;
  // Largest |sum_k f_k - phi^{n+1}| over nodes after the update.
  double moment_defect = 0.0;
};

DistributionField kinetic_step(const DistributionField& dist,
                               const SchemeParams& params,
                               const LatticeModel& model,
                               KineticReport* report = nullptr);

}  // namespace acefd::kinetic
