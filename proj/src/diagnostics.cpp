#include "acefd/diagnostics.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <cmath>
#include <sstream>

#include "acefd/error.hpp"

namespace acefd {

void CompensatedSum::add(double v) noexcept {
  const double t = sum_ + v;
  if (std::fabs(sum_) >= std::fabs(v)) {
    comp_ += (sum_ - t) + v;
  } else {
    comp_ += (v - t) + sum_;
  }
  sum_ = t;
}

double stencil_quadratic_form(const ScalarField& field) {
  ScalarField lap = apply_stencil(field);
  CompensatedSum acc;
  for (std::size_t i = 0; i < field.size(); ++i) acc.add(-field[i] * lap[i]);
  return acc.value();
}

double discrete_energy(const ScalarField& field, const SchemeParams& params) {
  const GridSpec& spec = field.spec();
  CompensatedSum bulk;
  for (double phi : field.values()) {
    const double w = phi * phi - 1.0;
    bulk.add(0.25 * w * w);
  }
  const double gradient = stencil_quadratic_form(field);
  const double volume = std::pow(spec.spacing(), spec.dim());
  return volume *
         (bulk.value() + params.eps_ratio / (2.0 * params.dt) * gradient);
}

MonotoneVerdict check_energy_monotone(std::span<const EnergyRecord> records,
                                      double tol) {
  MonotoneVerdict v;
  if (records.empty()) return v;
  if (tol < 0.0) {
    double scale = 0.0;
    for (const auto& r : records) scale = std::fmax(scale, std::fabs(r.energy));
    tol = 1e-12 * scale;
  }
  for (std::size_t i = 1; i < records.size(); ++i) {
    const double inc = records[i].energy - records[i - 1].energy;
    if (!(inc <= tol)) {
      if (v.pass) v.first_violation = i;
      v.pass = false;
    }
    if (inc > v.worst_increase || std::isnan(inc)) v.worst_increase = inc;
  }
  return v;
}

MatrixVerdict check_energy_matrix(const SchemeParams& params,
                                    const GridSpec& spec) {
  const std::size_t n = spec.node_count();
  if (n > 4096) {
    throw InvalidArgument("check_energy_matrix: grid larger than 4096 nodes");
  }
  const double eps = params.eps_ratio;
  const double dt = params.dt;
  const int d = spec.dim();
  MatrixVerdict v;

  // Differences below `tie` are rounding, so the bound itself counts as equal.
  const double tie = 1e-12 * 4.0;
  const double margin = 4.0 - dt - 4.0 * d * eps;
  if (spec.bc() == Boundary::kDirichlet) {
    v.dominance_condition = margin > 0.0 && margin - 4.0 * d * eps > tie;
  } else {
    v.dominance_condition = margin > 0.0 && margin - 4.0 * d * eps >= -tie;
  }

  using Triplet = Eigen::Triplet<double>;
  std::vector<Triplet> triplets;
  triplets.reserve(n * (2 * d + 1));
  const int np = spec.nodes_per_axis();
  for (std::size_t i = 0; i < n; ++i) {
    const MultiIndex node = spec.unflatten(i);
    triplets.emplace_back(i, i, 4.0 - dt + 2.0 * eps * matrix_diagonal(spec, node));
    for (int a = 0; a < d; ++a) {
      const std::size_t stride = spec.stride(a);
      for (int sign : {+1, -1}) {
        const int c = node[a] + sign;
        std::size_t j;
        if (c >= 0 && c < np) {
          j = sign > 0 ? i + stride : i - stride;
        } else if (spec.bc() == Boundary::kPeriodic) {
          j = sign > 0 ? i - stride * (np - 1) : i + stride * (np - 1);
        } else {
          continue;  // mirror is on the diagonal, Dirichlet drops it
        }
        triplets.emplace_back(i, j, 2.0 * eps);
      }
    }
  }
  Eigen::SparseMatrix<double> m(n, n);
  m.setFromTriplets(triplets.begin(), triplets.end());

  Eigen::SparseMatrix<double> mt = m.transpose();
  v.symmetric = (m - mt).norm() == 0.0;

  bool weak = true;
  bool any_strict = false;
  bool all_strict = true;
  for (int k = 0; k < m.outerSize(); ++k) {
    double diag = 0.0;
    double off = 0.0;
    for (Eigen::SparseMatrix<double>::InnerIterator it(m, k); it; ++it) {
      if (it.row() == it.col()) {
        diag = it.value();
      } else {
        off += std::fabs(it.value());
      }
    }
    if (!(diag > 0.0) || diag - off < -tie) weak = false;
    if (diag - off > tie) {
      any_strict = true;
    } else {
      all_strict = false;
    }
  }
  const bool connected = eps > 0.0 || n == 1;
  v.row_dominance = weak && (all_strict || (any_strict && connected));

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(m);
  v.positive_definite =
      ldlt.info() == Eigen::Success && (ldlt.vectorD().array() > 0.0).all();

  if (n <= 512) {
    Eigen::MatrixXd dense(m);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense,
                                                      Eigen::EigenvaluesOnly);
    v.min_eigenvalue = es.eigenvalues().minCoeff();
    if (*v.min_eigenvalue <= 0.0) v.positive_definite = false;
  }

  std::ostringstream detail;
  detail << "margin 4-dt-4d*eps = " << margin << ", 4d*eps = " << 4.0 * d * eps;
  if (v.min_eigenvalue) detail << ", min eigenvalue = " << *v.min_eigenvalue;
  if (!v.dominance_condition) detail << "; dominance condition fails";
  if (!v.positive_definite) detail << "; not positive definite";
  v.detail = detail.str();
  return v;
}

ErrorNorms error_norms(const ScalarField& numeric,
                       const ScalarField& reference) {
  if (!(numeric.spec() == reference.spec())) {
    throw InvalidArgument("error_norms: fields live on different grids");
  }
  const GridSpec& spec = numeric.spec();
  ErrorNorms e;
  CompensatedSum sq;
  for (std::size_t i = 0; i < numeric.size(); ++i) {
    const double diff = numeric[i] - reference[i];
    e.err_inf = std::fmax(e.err_inf, std::fabs(diff));
    sq.add(diff * diff);
  }
  const double sum = sq.value();
  e.err_l2 = std::sqrt(std::pow(spec.spacing(), spec.dim()) * sum);
  e.err_rms =
      std::sqrt(sum / std::pow(spec.subdivisions() + 1.0, spec.dim()));
  return e;
}

std::vector<ErrorReport> convergence_rates(std::vector<ErrorReport> reports,
                                           Refinement rule) {
  for (std::size_t i = 1; i < reports.size(); ++i) {
    const double coarse = reports[i - 1].dx;
    const double fine = reports[i].dx;
    if (!(fine > 0.0) || !(coarse > fine)) {
      throw InvalidArgument("convergence_rates: spacings must decrease");
    }
    if (rule == Refinement::kHalving &&
        std::fabs(coarse / fine - 2.0) > 2e-9) {
      throw InvalidArgument("convergence_rates: spacing does not halve");
    }
    const double log_ratio = std::log(coarse / fine);
    auto rate = [&](double ec, double ef) -> std::optional<double> {
      if (!(ec > 0.0) || !(ef > 0.0)) return std::nullopt;
      return std::log(ec / ef) / log_ratio;
    };
    reports[i].cr_inf = rate(reports[i - 1].err_inf, reports[i].err_inf);
    reports[i].cr_l2 = rate(reports[i - 1].err_l2, reports[i].err_l2);
  }
  if (!reports.empty()) {
    reports[0].cr_inf.reset();
    reports[0].cr_l2.reset();
  }
  return reports;
}

}  // namespace acefd
