#pragma once

#include <span>
#include <vector>

#include "homobl/grid.hpp"
#include "homobl/linsolve.hpp"
#include "homobl/stencil.hpp"
#include "homobl/tensor.hpp"

namespace homobl {

// Correctors are matrix valued. A field holding an N x N matrix per node
// stores entry (i, k) at component i*N + k; column k is the response to the
// k-th unit vector.
//
// Sign convention: chi^g solves -div(A grad chi^g) = div(A e_g), so that
// grad chi + Id is the microscopic gradient. The expansion then reads
// u ~ u0 + eps (chi^a d_a u0 + ubar1) + eps^2 (Ups^{ab} d_ab u0 + chi^a d_a ubar1).

struct CorrectorSet {
  TensorShape shape;
  int resolution = 0;
  std::vector<TorusField> chi;      ///< chi^g, g < d
  std::vector<double> A0;           ///< homogenized tensor, TensorShape layout
  std::vector<TorusField> B;        ///< B^{ab} at index a*d + b
  std::vector<TorusField> upsilon;  ///< Ups^{ab} at index a*d + b, zero mean
  std::vector<double> c;            ///< c^{abg}_{ij} at c_index(a, b, g, i, j)
  std::vector<SolveStats> chi_stats;
  std::vector<SolveStats> upsilon_stats;
  double mean_b_defect = 0.0;  ///< max |mean(B^{ab}) - A0^{ab}|

  bool has_second_order() const { return !upsilon.empty(); }
  int c_index(int a, int b, int g, int i, int j) const {
    const int d = shape.dim, N = shape.components;
    return (((a * d + b) * d + g) * N + i) * N + j;
  }
};

/// Solves the d periodic cell problems (N columns each) with zero mean.
std::vector<TorusField> solve_cell(const TensorField& A, const SolveOptions& opts,
                                   std::vector<SolveStats>* stats = nullptr, int threads = 1);

/// A0^{ab} = mean(A^{ab} + A^{ag} d_g chi^b), evaluated with the same discrete
/// fluxes as the cell operator.
std::vector<double> homogenized_tensor(const TensorField& A, const std::vector<TorusField>& chi);

struct UpsilonResult {
  std::vector<TorusField> B;
  std::vector<TorusField> upsilon;
  std::vector<SolveStats> stats;
  double mean_b_defect = 0.0;
};

/// B^{ab} = A^{ab} + A^{ag} d_g chi^b + d_g(A^{ga} chi^b) and the zero-mean
/// solutions of -div(A grad Ups^{ab}) = B^{ab} - mean(B^{ab}).
UpsilonResult solve_upsilon(const TensorField& A, const std::vector<TorusField>& chi,
                            std::span<const double> A0, const SolveOptions& opts, int threads = 1);

/// c^{abg} = mean(A^{gh} d_h Ups^{ab} + A^{ab} chi^g).
std::vector<double> third_order_coeffs(const TensorField& A, const std::vector<TorusField>& chi,
                                       const std::vector<TorusField>& upsilon);

/// chi, A0 and, when `second_order`, B, Ups and c.
CorrectorSet compute_correctors(const TensorField& A, const SolveOptions& opts, bool second_order = true,
                                int threads = 1);

/// Nodal field on a rectangular domain grid: node (i, j) sits at
/// origin + (i hx, j hy).
struct GridFunction {
  StencilGrid grid;
  double x0 = 0.0, y0 = 0.0;
  int components = 1;
  std::vector<double> values;

  void point(std::size_t node, double x[2]) const {
    x[0] = x0 + grid.col(node) * grid.hx;
    x[1] = y0 + grid.row(node) * grid.hy;
  }
};

/// u0 + eps u1 (+ eps^2 u2) with correctors read at x/eps. `ubar1` may be
/// empty (treated as zero). Order above 2 throws UnsupportedError.
std::vector<double> assemble_expansion(const GridFunction& u0, std::span<const double> ubar1,
                                       const CorrectorSet& correctors, double eps, int order);

}  // namespace homobl
