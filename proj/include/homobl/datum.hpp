#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "homobl/grid.hpp"

namespace homobl {

using PointFn = std::function<void(std::span<const double> x, std::span<double> out)>;

/// One oscillating contribution w(x) p(y) with p 1-periodic in y and R^N valued.
struct OscillatingTerm {
  std::function<double(std::span<const double> x)> weight;
  PointFn profile;                 ///< y -> p(y)
  std::optional<TorusField> table;  ///< when present, p is read from the table

  void evaluate_profile(std::span<const double> y, std::span<double> out) const;
};

/// Axis-aligned box containing the boundary points where the datum may be evaluated.
struct BoundaryChart {
  std::vector<double> lower, upper;
  bool contains(std::span<const double> x, double tol = 1e-12) const;
};

/// Oscillating Dirichlet datum phi(x, y) = g(x) + sum_k w_k(x) p_k(y).
///
/// The separated form keeps the y-dependence independent of the boundary
/// point, so boundary-layer tails of the p_k can be shared across points.
class DirichletDatum {
 public:
  DirichletDatum() = default;
  DirichletDatum(int dim, int components, BoundaryChart chart, PointFn slow,
                 std::vector<OscillatingTerm> terms = {});

  int dim() const { return dim_; }
  int components() const { return components_; }
  const BoundaryChart& chart() const { return chart_; }
  const std::vector<OscillatingTerm>& terms() const { return terms_; }
  bool oscillates() const { return !terms_.empty(); }

  /// phi(x, y); y is reduced mod Z^d. Throws DomainError outside the chart.
  void evaluate(std::span<const double> x, std::span<double> y, std::span<double> out) const;
  std::vector<double> evaluate(std::span<const double> x, std::span<const double> y) const;

  void slow(std::span<const double> x, std::span<double> out) const;

  /// The same datum with every profile tabulated on an M-grid and read by
  /// bilinear interpolation.
  DirichletDatum tabulated(int resolution) const;

 private:
  int dim_ = 2;
  int components_ = 1;
  BoundaryChart chart_;
  PointFn slow_;
  std::vector<OscillatingTerm> terms_;
};

}  // namespace homobl
