#include "acefd/grid.hpp"

#include <cmath>
#include <sstream>

#include "acefd/error.hpp"

namespace acefd {

const char* to_string(Boundary bc) noexcept {
  switch (bc) {
    case Boundary::kNeumann:
      return "neumann";
    case Boundary::kDirichlet:
      return "dirichlet";
    case Boundary::kPeriodic:
      return "periodic";
  }
  return "unknown";
}

Boundary parse_boundary(const std::string& text) {
  if (text == "neumann" || text == "hn") return Boundary::kNeumann;
  if (text == "dirichlet" || text == "hd") return Boundary::kDirichlet;
  if (text == "periodic" || text == "p") return Boundary::kPeriodic;
  throw InvalidArgument("unknown boundary condition '" + text + "'");
}

int nodes_per_axis(Boundary bc, int subdivisions) noexcept {
  switch (bc) {
    case Boundary::kNeumann:
      return subdivisions + 2;
    case Boundary::kDirichlet:
      return subdivisions - 1;
    case Boundary::kPeriodic:
      return subdivisions;
  }
  return 0;
}

GridSpec::GridSpec(int dim, int subdivisions, double length, Point origin,
                   Boundary bc)
    : dim_(dim),
      subdivisions_(subdivisions),
      length_(length),
      origin_(origin),
      bc_(bc) {
  if (dim < 1 || dim > kMaxDim) {
    throw InvalidArgument("dimension must be 1, 2 or 3");
  }
  if (subdivisions < 1) {
    throw InvalidArgument("subdivisions must be positive");
  }
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw InvalidArgument("domain length must be positive and finite");
  }
  nodes_per_axis_ = acefd::nodes_per_axis(bc, subdivisions);
  if (nodes_per_axis_ < 1) {
    throw InvalidArgument("Dirichlet grid needs at least 2 subdivisions");
  }
  for (int a = dim_; a < kMaxDim; ++a) origin_[a] = 0.0;
  std::size_t n = static_cast<std::size_t>(nodes_per_axis_);
  node_count_ = 1;
  for (int a = dim_ - 1; a >= 0; --a) {
    strides_[a] = node_count_;
    node_count_ *= n;
  }
  for (int a = dim_; a < kMaxDim; ++a) strides_[a] = 0;
}

bool GridSpec::contains(const MultiIndex& node) const noexcept {
  for (int a = 0; a < dim_; ++a) {
    if (node[a] < 0 || node[a] >= nodes_per_axis_) return false;
  }
  return true;
}

std::size_t GridSpec::flatten(const MultiIndex& node) const {
  if (!contains(node)) {
    std::ostringstream msg;
    msg << "node (";
    for (int a = 0; a < dim_; ++a) msg << (a ? "," : "") << node[a];
    msg << ") outside grid with " << nodes_per_axis_ << " nodes per axis";
    throw IndexError(msg.str());
  }
  std::size_t flat = 0;
  for (int a = 0; a < dim_; ++a) flat += strides_[a] * node[a];
  return flat;
}

MultiIndex GridSpec::unflatten(std::size_t flat) const {
  if (flat >= node_count_) throw IndexError("flat index out of range");
  MultiIndex node{0, 0, 0};
  for (int a = 0; a < dim_; ++a) {
    node[a] = static_cast<int>(flat / strides_[a]);
    flat %= strides_[a];
  }
  return node;
}

bool GridSpec::operator==(const GridSpec& other) const noexcept {
  return dim_ == other.dim_ && subdivisions_ == other.subdivisions_ &&
         length_ == other.length_ && origin_ == other.origin_ &&
         bc_ == other.bc_;
}

ScalarField::ScalarField(GridSpec spec, double fill)
    : spec_(spec), data_(spec.node_count(), fill) {}

ScalarField::ScalarField(GridSpec spec, std::vector<double> values)
    : spec_(spec), data_(std::move(values)) {
  if (data_.size() != spec_.node_count()) {
    throw InvalidArgument("field data length does not match the grid");
  }
}

double ScalarField::max_abs() const noexcept {
  double m = 0.0;
  for (double v : data_) m = std::fmax(m, std::fabs(v));
  return m;
}

std::size_t ScalarField::first_non_finite() const noexcept {
  for (std::size_t i = 0; i < data_.size(); ++i) {
    if (!std::isfinite(data_[i])) return i;
  }
  return data_.size();
}

namespace {

// Value reached by stepping off the stored range. `self` is the node's own
// flat index, `coord` its coordinate along the axis.
inline double off_grid(const double* data, Boundary bc, std::size_t self,
                       std::size_t stride, int n, int sign) {
  switch (bc) {
    case Boundary::kNeumann:
      return data[self];
    case Boundary::kDirichlet:
      return 0.0;
    case Boundary::kPeriodic:
      return sign > 0 ? data[self - stride * (n - 1)]
                      : data[self + stride * (n - 1)];
  }
  return 0.0;
}

inline double step_value(const double* data, Boundary bc, std::size_t self,
                         std::size_t stride, int coord, int n, int sign) {
  if (sign > 0) {
    return coord + 1 < n ? data[self + stride]
                         : off_grid(data, bc, self, stride, n, sign);
  }
  return coord > 0 ? data[self - stride]
                   : off_grid(data, bc, self, stride, n, sign);
}

}  // namespace

double neighbor_value(const ScalarField& field, const MultiIndex& node,
                      int axis, int sign) {
  const GridSpec& spec = field.spec();
  if (axis < 0 || axis >= spec.dim()) throw IndexError("axis out of range");
  std::size_t self = spec.flatten(node);
  return step_value(field.values().data(), spec.bc(), self, spec.stride(axis),
                    node[axis], spec.nodes_per_axis(), sign >= 0 ? 1 : -1);
}

double neighbor_sum(const ScalarField& field, const MultiIndex& node) {
  const GridSpec& spec = field.spec();
  std::size_t self = spec.flatten(node);
  const double* data = field.values().data();
  const int n = spec.nodes_per_axis();
  double sum = 0.0;
  for (int a = 0; a < spec.dim(); ++a) {
    sum += step_value(data, spec.bc(), self, spec.stride(a), node[a], n, +1);
    sum += step_value(data, spec.bc(), self, spec.stride(a), node[a], n, -1);
  }
  return sum;
}

void neighbor_sums(const ScalarField& field, std::span<double> out) {
  const GridSpec& spec = field.spec();
  if (out.size() != spec.node_count()) {
    throw InvalidArgument("output span has the wrong length");
  }
  const double* data = field.values().data();
  const int n = spec.nodes_per_axis();
  const int dim = spec.dim();
  const Boundary bc = spec.bc();
  MultiIndex node{0, 0, 0};
  for (std::size_t flat = 0; flat < out.size(); ++flat) {
    double sum = 0.0;
    for (int a = 0; a < dim; ++a) {
      const std::size_t stride = spec.stride(a);
      sum += step_value(data, bc, flat, stride, node[a], n, +1);
      sum += step_value(data, bc, flat, stride, node[a], n, -1);
    }
    out[flat] = sum;
    for (int a = dim - 1; a >= 0; --a) {
      if (++node[a] < n) break;
      node[a] = 0;
    }
  }
}

double stencil_diagonal(const GridSpec& spec) noexcept {
  return -2.0 * spec.dim();
}

double matrix_diagonal(const GridSpec& spec, const MultiIndex& node) {
  if (!spec.contains(node)) throw IndexError("node outside grid");
  double diag = -2.0 * spec.dim();
  if (spec.bc() == Boundary::kNeumann) {
    const int n = spec.nodes_per_axis();
    for (int a = 0; a < spec.dim(); ++a) {
      if (node[a] == 0) diag += 1.0;
      if (node[a] == n - 1) diag += 1.0;
    }
  }
  return diag;
}

void apply_stencil(const ScalarField& field, std::span<double> out) {
  neighbor_sums(field, out);
  const double diag = stencil_diagonal(field.spec());
  auto in = field.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += diag * in[i];
}

ScalarField apply_stencil(const ScalarField& field) {
  ScalarField out(field.spec());
  apply_stencil(field, out.values());
  return out;
}

std::vector<double> axis_matrix(Boundary bc, int n) {
  std::vector<double> m(static_cast<std::size_t>(n) * n, 0.0);
  auto at = [&](int r, int c) -> double& {
    return m[static_cast<std::size_t>(r) * n + c];
  };
  for (int r = 0; r < n; ++r) {
    at(r, r) = -2.0;
    if (r + 1 < n) at(r, r + 1) += 1.0;
    if (r > 0) at(r, r - 1) += 1.0;
  }
  if (bc == Boundary::kNeumann) {
    at(0, 0) += 1.0;
    at(n - 1, n - 1) += 1.0;
  } else if (bc == Boundary::kPeriodic) {
    at(0, n - 1) += 1.0;
    at(n - 1, 0) += 1.0;
  }
  return m;
}

namespace {

std::vector<double> kron(const std::vector<double>& a, std::size_t an,
                         const std::vector<double>& b, std::size_t bn) {
  const std::size_t n = an * bn;
  std::vector<double> out(n * n, 0.0);
  for (std::size_t ar = 0; ar < an; ++ar) {
    for (std::size_t ac = 0; ac < an; ++ac) {
      const double s = a[ar * an + ac];
      if (s == 0.0) continue;
      for (std::size_t br = 0; br < bn; ++br) {
        for (std::size_t bc = 0; bc < bn; ++bc) {
          out[(ar * bn + br) * n + ac * bn + bc] = s * b[br * bn + bc];
        }
      }
    }
  }
  return out;
}

std::vector<double> identity(std::size_t n) {
  std::vector<double> m(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) m[i * n + i] = 1.0;
  return m;
}

}  // namespace

std::vector<double> assemble_stencil_matrix(const GridSpec& spec) {
  const std::size_t n = static_cast<std::size_t>(spec.nodes_per_axis());
  const std::size_t total = spec.node_count();
  const auto d1 = axis_matrix(spec.bc(), static_cast<int>(n));
  const auto eye = identity(n);
  std::vector<double> result(total * total, 0.0);
  for (int axis = 0; axis < spec.dim(); ++axis) {
    // Factor `axis` carries D, the others the identity; axis 0 is the
    // leftmost (slowest) factor.
    std::vector<double> term = axis == 0 ? d1 : eye;
    std::size_t size = n;
    for (int f = 1; f < spec.dim(); ++f) {
      term = kron(term, size, f == axis ? d1 : eye, n);
      size *= n;
    }
    for (std::size_t i = 0; i < result.size(); ++i) result[i] += term[i];
  }
  return result;
}

Point node_coordinates(const GridSpec& spec, const MultiIndex& node) {
  if (!spec.contains(node)) throw IndexError("node outside grid");
  const double dx = spec.spacing();
  Point p{0.0, 0.0, 0.0};
  for (int a = 0; a < spec.dim(); ++a) {
    double offset = 0.0;
    switch (spec.bc()) {
      case Boundary::kNeumann:
        offset = node[a] - 0.5;
        break;
      case Boundary::kDirichlet:
        offset = node[a] + 1.0;
        break;
      case Boundary::kPeriodic:
        offset = node[a];
        break;
    }
    p[a] = spec.origin()[a] + dx * offset;
  }
  return p;
}

}  // namespace acefd
