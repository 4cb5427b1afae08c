#pragma once

#include <array>
#include <string>
#include <vector>

#include "homobl/cell.hpp"
#include "homobl/datum.hpp"

namespace homobl {

enum class DomainKind { Strip, Rectangle, Polygon, Disk };

std::string to_string(DomainKind k);

/// 2D domain description.
///
/// Strip: x1-periodic slab [0, width) x (0, 1) (bounds give x1 range and x2 range).
/// Rectangle: bounds = {x_lo, x_hi, y_lo, y_hi}.
/// Polygon: convex vertex list, counter-clockwise.
/// Disk: regular polygon inscribed in the circle; `sides` vertices, or, when
/// sides == 0, enough that the side length is about eps^alpha_geom.
struct DomainSpec {
  DomainKind kind = DomainKind::Strip;
  std::array<double, 4> bounds{0.0, 1.0, 0.0, 1.0};
  std::vector<std::array<double, 2>> vertices;
  std::array<double, 2> center{0.5, 0.5};
  double radius = 0.5;
  int sides = 0;
  double alpha_geom = 0.5;
};

/// A point of the boundary with its side and arc-length position.
struct BoundaryPoint {
  std::array<double, 2> x{};
  int side = 0;
  double s = 0.0;
  std::array<double, 2> outward{};
};

struct Side {
  std::array<double, 2> p0{}, p1{};
  std::array<double, 2> outward{};
  double s0 = 0.0;  ///< arc length at p0
  double length = 0.0;
};

class Domain {
 public:
  /// `eps` only matters for a disk with sides == 0.
  explicit Domain(DomainSpec spec, double eps = 0.0);

  const DomainSpec& spec() const { return spec_; }
  DomainKind kind() const { return spec_.kind; }
  const std::vector<Side>& sides() const { return sides_; }
  bool periodic_x() const { return spec_.kind == DomainKind::Strip; }
  /// Total boundary length; sides of a strip are not joined, so arc distance
  /// between them is infinite.
  double perimeter() const { return perimeter_; }
  bool closed_boundary() const { return !periodic_x(); }

  /// Strict interior test, with points within `tol` of the boundary outside.
  bool contains(std::span<const double> x, double tol = 1e-12) const;
  double distance_to_boundary(std::span<const double> x) const;
  BoundaryPoint project(std::span<const double> x) const;
  /// Arc distance along the boundary (periodic for closed boundaries).
  double arc_distance(const BoundaryPoint& p, const BoundaryPoint& q) const;

  BoundaryChart chart() const;

  /// Node grid of spacing about h: boundary nodes Dirichlet, interior nodes
  /// Unknown, nodes outside Inactive. Box domains must be divisible by h up
  /// to rounding.
  GridFunction make_grid(double h, int components) const;

  /// Quadrature weight of a node for integrals over the domain.
  double weight(const GridFunction& g, std::size_t node) const;

 private:
  DomainSpec spec_;
  std::vector<Side> sides_;
  double perimeter_ = 0.0;
};

}  // namespace homobl
