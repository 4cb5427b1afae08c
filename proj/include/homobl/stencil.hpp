#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "homobl/linsolve.hpp"
#include "homobl/tensor.hpp"

namespace homobl {

enum class NodeKind : std::uint8_t { Unknown, Dirichlet, Inactive };

/// Structured 2D node grid (axis 0 fastest) with per-node roles.
///
/// Axes may be periodic. With `neumann_top` the last row carries unknowns
/// with zero normal flux (half control volumes).
struct StencilGrid {
  int nx = 0, ny = 0;
  double hx = 1.0, hy = 1.0;
  bool periodic_x = false;
  bool periodic_y = false;
  bool neumann_top = false;
  std::vector<NodeKind> kind;

  static StencilGrid torus(int resolution);

  std::size_t size() const { return static_cast<std::size_t>(nx) * ny; }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) + static_cast<std::size_t>(nx) * j; }
  int col(std::size_t node) const { return static_cast<int>(node % nx); }
  int row(std::size_t node) const { return static_cast<int>(node / nx); }
  bool active(std::size_t node) const { return kind[node] != NodeKind::Inactive; }
  /// Active neighbor one step along `axis` (0 or 1), or -1.
  long long neighbor(std::size_t node, int axis, int shift) const;
  double spacing(int axis) const { return axis == 0 ? hx : hy; }
  double volume(std::size_t node) const;
  std::size_t count(NodeKind k) const;
};

/// Matrix-free second-order discretization of -div(A grad u) on a StencilGrid.
///
/// Written as K = D^T W A D: face differences carry the A^{aa} blocks, with
/// harmonic face averages for scalar problems and arithmetic ones for systems;
/// node-centred differences carry the mixed A^{ab}, a != b, blocks. K is
/// symmetric whenever A^{ab}_{ij} = A^{ba}_{ji}. Rows are scaled by the
/// control volume, so K u = vol * f discretizes -div(A grad u) = f.
class DivergenceOperator {
 public:
  DivergenceOperator(StencilGrid grid, int components, std::vector<double> node_coeffs);

  const StencilGrid& grid() const { return grid_; }
  int components() const { return N_; }
  const TensorShape& shape() const { return shape_; }
  bool symmetric() const { return symmetric_; }
  std::span<const double> coeffs(std::size_t node) const {
    return {coeffs_.data() + node * shape_.entries(), static_cast<std::size_t>(shape_.entries())};
  }

  /// out = K (u + affine), where the affine part has gradient `slope`
  /// (slope[a*N + c] = d/dx_a of component c). Every row is filled.
  void apply(std::span<const double> u, std::span<double> out, std::span<const double> slope = {}) const;

  /// Same as apply, restricted to Unknown rows (other rows zeroed).
  void apply_unknowns(std::span<const double> u, std::span<double> out) const;
  void jacobi(std::span<const double> r, std::span<double> z) const;

  /// Flux density (A grad u)_a through the face between `node` and its +axis
  /// neighbor, using only the A^{aa} block. Zero when the face does not exist.
  void face_flux(std::size_t node, int axis, std::span<const double> u, std::span<const double> slope,
                 std::span<double> out) const;
  /// Mixed part sum_{b != a} A^{ab} d_b u at `node`.
  void cross_flux(std::size_t node, int axis, std::span<const double> u, std::span<const double> slope,
                  std::span<double> out) const;
  /// Difference quotient d_axis u at a node: centred where both neighbors
  /// exist, one-sided otherwise.
  void gradient(std::size_t node, int axis, std::span<const double> u, std::span<const double> slope,
                std::span<double> out) const;

  bool has_cross_terms() const { return has_cross_; }

 private:
  double face_weight(std::size_t node, int axis) const;

  StencilGrid grid_;
  int N_;
  TensorShape shape_;
  std::vector<double> coeffs_;
  std::vector<long long> nbr_[2][2];  // [axis][0: minus, 1: plus]
  std::vector<double> face_[2];       // [axis] N*N block toward +axis neighbor
  std::vector<double> diag_;
  bool has_cross_ = false;
  bool symmetric_ = true;
};

/// d_axis of a nodal field (N components per node) at every active node,
/// with the same difference quotients as DivergenceOperator::gradient.
void nodal_gradient(const StencilGrid& g, int components, std::span<const double> u, int axis,
                    std::span<double> out);

struct FieldSolve {
  std::vector<double> u;
  SolveStats stats;
};

/// Solves K u = vol * f on Unknown nodes with u fixed at Dirichlet nodes to
/// the corresponding entries of `boundary`. Throws SolverError on failure.
FieldSolve solve_dirichlet(const DivergenceOperator& op, std::span<const double> f,
                           std::span<const double> boundary, const SolveOptions& opts,
                           const char* what = "Dirichlet solve");

/// Solves K u = rhs on a fully periodic grid; rhs is projected to zero mean
/// per component and the returned u has zero mean.
FieldSolve solve_periodic(const DivergenceOperator& op, std::vector<double> rhs, const SolveOptions& opts,
                          const char* what = "periodic solve");

}  // namespace homobl
