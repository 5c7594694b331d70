#include "acefd/kinetic.hpp"

#include <cmath>

#include "acefd/error.hpp"

namespace acefd::kinetic {

LatticeModel::LatticeModel(int dim, double omega1, double lattice_speed)
    : dim_(dim), speed_(lattice_speed) {
  if (dim < 1 || dim > kMaxDim) throw InvalidArgument("dimension must be 1..3");
  if (!(omega1 > 0.0 && omega1 <= 1.0 / (2.0 * dim))) {
    throw InvalidArgument("omega1 must lie in (0, 1/(2d)]");
  }
  if (!(lattice_speed > 0.0)) {
    throw InvalidArgument("lattice speed must be positive");
  }
  weights_[0] = 1.0 - 2.0 * dim * omega1;
  for (int k = 1; k <= 2 * dim; ++k) weights_[k] = omega1;
}

std::pair<int, int> LatticeModel::direction(int k) const noexcept {
  if (k == 0) return {-1, 0};
  if (k <= dim_) return {k - 1, +1};
  return {k - dim_ - 1, -1};
}

double LatticeModel::velocity(int k, int axis) const noexcept {
  auto [a, sign] = direction(k);
  return a == axis ? sign * speed_ : 0.0;
}

std::vector<double> equilibrium(double phi, const LatticeModel& model) {
  std::vector<double> f(model.velocity_count());
  for (int k = 0; k < model.velocity_count(); ++k) {
    f[k] = model.weight(k) * phi;
  }
  return f;
}

DistributionField::DistributionField(GridSpec spec, int velocity_count)
    : spec_(spec),
      q_(velocity_count),
      data_(spec.node_count() * static_cast<std::size_t>(velocity_count),
            0.0) {
  if (velocity_count != 2 * spec.dim() + 1) {
    throw InvalidArgument("velocity count must be 2d+1");
  }
}

DistributionField equilibrium_field(const ScalarField& phi,
                                    const LatticeModel& model) {
  if (phi.spec().dim() != model.dim()) {
    throw InvalidArgument("lattice model and grid dimensions differ");
  }
  DistributionField dist(phi.spec(), model.velocity_count());
  for (std::size_t i = 0; i < phi.size(); ++i) {
    for (int k = 0; k < model.velocity_count(); ++k) {
      dist(i, k) = model.weight(k) * phi[i];
    }
  }
  return dist;
}

ScalarField moment_phi(const DistributionField& dist) {
  ScalarField phi(dist.spec());
  const int q = dist.velocity_count();
  for (std::size_t i = 0; i < phi.size(); ++i) {
    double sum = 0.0;
    for (int k = 0; k < q; ++k) sum += dist(i, k);
    phi[i] = sum;
  }
  return phi;
}

double gradient_upwind(const ScalarField& field, const MultiIndex& node,
                       int axis, int direction) {
  const double dx = field.spec().spacing();
  const double self = field.at(node);
  if (direction > 0) {
    return (neighbor_value(field, node, axis, +1) - self) / dx;
  }
  return (self - neighbor_value(field, node, axis, -1)) / dx;
}

DistributionField kinetic_step(const DistributionField& dist,
                               const SchemeParams& params,
                               const LatticeModel& model,
                               KineticReport* report) {
  const GridSpec& spec = dist.spec();
  if (spec.dim() != model.dim() || params.dim != model.dim()) {
    throw InvalidArgument("kinetic_step: dimension mismatch");
  }
  if (std::fabs(spec.spacing() - params.dx) > 1e-12 * params.dx) {
    throw InvalidArgument("kinetic_step: grid spacing differs from params.dx");
  }
  const int q = model.velocity_count();
  const double dt = params.dt;
  const double s = params.relaxation;
  const double cs2 = model.sound_speed_sq();
  const double s_a = (1.0 - s) / cs2;

  const ScalarField phi = moment_phi(dist);
  DistributionField next(spec, q);
  std::vector<double> xi(phi.size());

  for (std::size_t i = 0; i < phi.size(); ++i) {
    const MultiIndex node = spec.unflatten(i);
    const double here = phi[i];
    const double source = -reaction(here);
    double total = 0.0;
    for (int k = 0; k < q; ++k) {
      const double w = model.weight(k);
      double rhs = 0.5 * dt * w * source;
      if (k == 0) {
        rhs += w * here;
      } else {
        auto [axis, sign] = model.direction(k);
        // Upstream point x - c_k dt is the neighbour opposite to velocity k.
        const double upstream = neighbor_value(phi, node, axis, -sign);
        const double grad = gradient_upwind(phi, node, axis, -sign);
        const double pi_ne = -dt * cs2 * grad / s;
        const double c_dot_pi = sign * model.lattice_speed() * pi_ne;
        rhs += w * upstream + s_a * (w * c_dot_pi);
      }
      next(i, k) = rhs;
      total += rhs;
    }
    xi[i] = total;
  }

  StepReport sr;
  resolve_cubic(xi, dt, sr, !params.unsafe());

  double defect = 0.0;
  double max_abs = 0.0;
  for (std::size_t i = 0; i < phi.size(); ++i) {
    const double updated = xi[i];
    if (!std::isfinite(updated)) {
      throw NumericError("non-finite value at node " + std::to_string(i), i);
    }
    const double source = -reaction(updated);
    double sum = 0.0;
    for (int k = 0; k < q; ++k) {
      next(i, k) += 0.5 * dt * model.weight(k) * source;
      sum += next(i, k);
    }
    defect = std::fmax(defect, std::fabs(sum - updated));
    max_abs = std::fmax(max_abs, std::fabs(updated));
  }
  sr.max_abs = max_abs;
  if (report) {
    report->step = sr;
    report->moment_defect = defect;
  }
  return next;
}

}  // namespace acefd::kinetic
