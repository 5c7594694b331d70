#pragma once

// Uniform d-dimensional lattice on a square domain, boundary handling, and the
// matrix-free dimensionless Laplacian stencil.
//
// Storage is row-major with the last axis fastest. The number of stored nodes
// per axis depends on the boundary condition:
//
//   Neumann    N + 2   cell-centred, x_i = L + dx (i - 1/2), i = 0..N+1
//   Dirichlet  N - 1   interior only, x_i = L + dx (i + 1), boundary values 0
//   Periodic   N       x_i = L + dx i, i = 0..N-1, node N-1 couples to 0
//
// The Neumann face nodes sit half a cell outside the domain.

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace acefd {

enum class Boundary { kNeumann, kDirichlet, kPeriodic };

const char* to_string(Boundary bc) noexcept;
Boundary parse_boundary(const std::string& text);

inline constexpr int kMaxDim = 3;

using MultiIndex = std::array<int, kMaxDim>;
using Point = std::array<double, kMaxDim>;

class GridSpec {
 public:
  GridSpec() = default;

  // Throws InvalidArgument for d outside 1..3, non-positive N or length, or a
  // Dirichlet grid with no interior node.
  GridSpec(int dim, int subdivisions, double length, Point origin,
           Boundary bc);

  int dim() const noexcept { return dim_; }
  int subdivisions() const noexcept { return subdivisions_; }
  double length() const noexcept { return length_; }
  const Point& origin() const noexcept { return origin_; }
  Boundary bc() const noexcept { return bc_; }

  double spacing() const noexcept { return length_ / subdivisions_; }
  int nodes_per_axis() const noexcept { return nodes_per_axis_; }
  std::size_t node_count() const noexcept { return node_count_; }
  // Flat-index stride of `axis`.
  std::size_t stride(int axis) const noexcept { return strides_[axis]; }

  bool contains(const MultiIndex& node) const noexcept;
  std::size_t flatten(const MultiIndex& node) const;
  MultiIndex unflatten(std::size_t flat) const;

  bool operator==(const GridSpec& other) const noexcept;

 private:
  int dim_ = 1;
  int subdivisions_ = 2;
  double length_ = 1.0;
  Point origin_{};
  Boundary bc_ = Boundary::kPeriodic;
  int nodes_per_axis_ = 3;
  std::size_t node_count_ = 3;
  std::array<std::size_t, kMaxDim> strides_{1, 1, 1};
};

int nodes_per_axis(Boundary bc, int subdivisions) noexcept;

class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(GridSpec spec, double fill = 0.0);
  ScalarField(GridSpec spec, std::vector<double> values);

  const GridSpec& spec() const noexcept { return spec_; }
  std::size_t size() const noexcept { return data_.size(); }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }

  double& operator[](std::size_t flat) noexcept { return data_[flat]; }
  double operator[](std::size_t flat) const noexcept { return data_[flat]; }
  double& at(const MultiIndex& node) { return data_[spec_.flatten(node)]; }
  double at(const MultiIndex& node) const {
    return data_[spec_.flatten(node)];
  }

  double max_abs() const noexcept;
  // Flat index of the first non-finite entry, or size() if all finite.
  std::size_t first_non_finite() const noexcept;

 private:
  GridSpec spec_;
  std::vector<double> data_;
};

// Neighbour of `node` one step along `axis` in direction `sign` (+1/-1) after
// boundary resolution. Mirror for Neumann, zero for Dirichlet, wraparound for
// periodic.
double neighbor_value(const ScalarField& field, const MultiIndex& node,
                      int axis, int sign);

// Sum over axes k = 0..d-1 of (plus-neighbour + minus-neighbour), accumulated
// in that fixed order. Throws IndexError if `node` is out of range.
double neighbor_sum(const ScalarField& field, const MultiIndex& node);

// Fills `out` with neighbor_sum for every node (same order and rounding as
// the single-node version).
void neighbor_sums(const ScalarField& field, std::span<double> out);

// Diagonal that pairs with neighbor_sum: (Lambda phi)_i = neighbor_sum(i) +
// stencil_diagonal * phi_i. Mirror neighbours are inside neighbor_sum, so this
// is -2d at every node for every boundary condition.
double stencil_diagonal(const GridSpec& spec) noexcept;

// Diagonal entry of the assembled Kronecker matrix at `node`: -2d plus one for
// every Neumann face the node touches.
double matrix_diagonal(const GridSpec& spec, const MultiIndex& node);

// Lambda * phi for the dimensionless stencil Lambda = dx^2 * Lambda_dx.
ScalarField apply_stencil(const ScalarField& field);
// `out` must not alias the field's storage.
void apply_stencil(const ScalarField& field, std::span<double> out);

// Dense explicit Lambda assembled as a sum of Kronecker products of the 1-D
// boundary matrices. Row-major node_count x node_count. Intended for small
// grids only (verification and the energy-matrix check).
std::vector<double> assemble_stencil_matrix(const GridSpec& spec);

// The 1-D boundary matrix (dimensionless), row-major n x n.
std::vector<double> axis_matrix(Boundary bc, int nodes);

Point node_coordinates(const GridSpec& spec, const MultiIndex& node);

}  // namespace acefd
