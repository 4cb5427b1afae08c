#include "homobl/domain.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <numbers>

#include "homobl/error.hpp"

namespace homobl {

std::string to_string(DomainKind k) {
  switch (k) {
    case DomainKind::Strip: return "strip";
    case DomainKind::Rectangle: return "rectangle";
    case DomainKind::Polygon: return "polygon";
    case DomainKind::Disk: return "disk";
  }
  return "unknown";
}

namespace {

Side make_side(std::array<double, 2> p0, std::array<double, 2> p1, double s0) {
  Side s;
  s.p0 = p0;
  s.p1 = p1;
  const double dx = p1[0] - p0[0], dy = p1[1] - p0[1];
  s.length = std::hypot(dx, dy);
  // counter-clockwise traversal: outward normal is the tangent turned clockwise
  s.outward = {dy / s.length, -dx / s.length};
  s.s0 = s0;
  return s;
}

int grid_count(double extent, double h, const char* what) {
  const double r = extent / h;
  const int n = static_cast<int>(std::lround(r));
  if (n < 1 || std::abs(r - n) > 1e-9 * std::max(1.0, r))
    throw ResolutionError(fmt::format("{} {} is not a multiple of the mesh size {}", what, extent, h));
  return n;
}

}  // namespace

Domain::Domain(DomainSpec spec, double eps) : spec_(std::move(spec)) {
  const auto& b = spec_.bounds;
  switch (spec_.kind) {
    case DomainKind::Strip: {
      if (!(b[1] > b[0] && b[3] > b[2])) throw DomainError("strip bounds are empty");
      const double w = b[1] - b[0];
      sides_.push_back(make_side({b[0], b[2]}, {b[1], b[2]}, 0.0));
      sides_.push_back(make_side({b[1], b[3]}, {b[0], b[3]}, w));
      perimeter_ = 2.0 * w;
      return;
    }
    case DomainKind::Rectangle:
      if (!(b[1] > b[0] && b[3] > b[2])) throw DomainError("rectangle bounds are empty");
      spec_.vertices = {{b[0], b[2]}, {b[1], b[2]}, {b[1], b[3]}, {b[0], b[3]}};
      break;
    case DomainKind::Disk: {
      if (!(spec_.radius > 0.0)) throw DomainError("disk radius must be positive");
      int K = spec_.sides;
      if (K == 0) {
        if (!(eps > 0.0)) throw DomainError("disk without a side count needs eps to size its sides");
        const double target = std::pow(eps, spec_.alpha_geom);
        K = static_cast<int>(std::ceil(std::numbers::pi / std::asin(std::min(1.0, target / (2.0 * spec_.radius)))));
      }
      K = std::max(K, 3);
      spec_.sides = K;
      spec_.vertices.clear();
      for (int k = 0; k < K; ++k) {
        const double t = 2.0 * std::numbers::pi * k / K;
        spec_.vertices.push_back({spec_.center[0] + spec_.radius * std::cos(t),
                                  spec_.center[1] + spec_.radius * std::sin(t)});
      }
      break;
    }
    case DomainKind::Polygon:
      break;
  }
  const auto& v = spec_.vertices;
  if (v.size() < 3) throw DomainError("polygon needs at least 3 vertices");
  for (std::size_t k = 0; k < v.size(); ++k) {
    const auto& p = v[k];
    const auto& q = v[(k + 1) % v.size()];
    const auto& r = v[(k + 2) % v.size()];
    const double cross = (q[0] - p[0]) * (r[1] - q[1]) - (q[1] - p[1]) * (r[0] - q[0]);
    if (!(cross > 0.0)) throw DomainError("polygon must be convex with counter-clockwise vertices");
  }
  double s = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    sides_.push_back(make_side(v[k], v[(k + 1) % v.size()], s));
    s += sides_.back().length;
  }
  perimeter_ = s;
}

bool Domain::contains(std::span<const double> x, double tol) const {
  if (periodic_x()) return x[1] > spec_.bounds[2] + tol && x[1] < spec_.bounds[3] - tol;
  for (const auto& sd : sides_) {
    if ((x[0] - sd.p0[0]) * sd.outward[0] + (x[1] - sd.p0[1]) * sd.outward[1] > -tol) return false;
  }
  return true;
}

BoundaryPoint Domain::project(std::span<const double> x) const {
  BoundaryPoint best;
  double bd = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < sides_.size(); ++k) {
    const Side& sd = sides_[k];
    double t;
    std::array<double, 2> p;
    if (periodic_x()) {
      // sides of the strip are full lines in x1
      p = {x[0], sd.p0[1]};
      t = std::abs(x[0] - sd.p0[0]);
    } else {
      const double dx = sd.p1[0] - sd.p0[0], dy = sd.p1[1] - sd.p0[1];
      t = ((x[0] - sd.p0[0]) * dx + (x[1] - sd.p0[1]) * dy) / (sd.length * sd.length);
      t = std::clamp(t, 0.0, 1.0);
      p = {sd.p0[0] + t * dx, sd.p0[1] + t * dy};
      t *= sd.length;
    }
    const double d = std::hypot(x[0] - p[0], x[1] - p[1]);
    if (d < bd) {
      bd = d;
      best.x = p;
      best.side = static_cast<int>(k);
      best.s = sd.s0 + t;
      best.outward = sd.outward;
    }
  }
  return best;
}

double Domain::distance_to_boundary(std::span<const double> x) const {
  const BoundaryPoint p = project(x);
  return std::hypot(x[0] - p.x[0], x[1] - p.x[1]);
}

double Domain::arc_distance(const BoundaryPoint& p, const BoundaryPoint& q) const {
  if (periodic_x()) {
    if (p.side != q.side) return std::numeric_limits<double>::infinity();
    const double w = spec_.bounds[1] - spec_.bounds[0];
    const double d = std::fmod(std::abs(p.x[0] - q.x[0]), w);
    return std::min(d, w - d);
  }
  const double d = std::abs(p.s - q.s);
  return std::min(d, perimeter_ - d);
}

BoundaryChart Domain::chart() const {
  BoundaryChart c;
  if (spec_.kind == DomainKind::Strip) {
    c.lower = {spec_.bounds[0], spec_.bounds[2]};
    c.upper = {spec_.bounds[1], spec_.bounds[3]};
    return c;
  }
  if (spec_.kind == DomainKind::Disk) {
    // the circle's box, so the chart does not depend on the side count
    c.lower = {spec_.center[0] - spec_.radius, spec_.center[1] - spec_.radius};
    c.upper = {spec_.center[0] + spec_.radius, spec_.center[1] + spec_.radius};
    return c;
  }
  c.lower = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  c.upper = {-c.lower[0], -c.lower[1]};
  for (const auto& v : spec_.vertices)
    for (int a = 0; a < 2; ++a) {
      c.lower[a] = std::min(c.lower[a], v[a]);
      c.upper[a] = std::max(c.upper[a], v[a]);
    }
  return c;
}

GridFunction Domain::make_grid(double h, int components) const {
  if (!(h > 0.0)) throw ResolutionError("mesh size must be positive");
  GridFunction f;
  f.components = components;
  StencilGrid& g = f.grid;
  const auto& b = spec_.bounds;
  if (spec_.kind == DomainKind::Strip || spec_.kind == DomainKind::Rectangle) {
    const int cx = grid_count(b[1] - b[0], h, "domain width");
    const int cy = grid_count(b[3] - b[2], h, "domain height");
    g.periodic_x = spec_.kind == DomainKind::Strip;
    g.nx = g.periodic_x ? cx : cx + 1;
    g.ny = cy + 1;
    g.hx = (b[1] - b[0]) / cx;
    g.hy = (b[3] - b[2]) / cy;
    f.x0 = b[0];
    f.y0 = b[2];
    g.kind.assign(g.size(), NodeKind::Unknown);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const bool edge = j == 0 || j == g.ny - 1 || (!g.periodic_x && (i == 0 || i == g.nx - 1));
        if (edge) g.kind[g.index(i, j)] = NodeKind::Dirichlet;
      }
  } else {
    const BoundaryChart c = chart();
    g.hx = g.hy = h;
    g.nx = static_cast<int>(std::ceil((c.upper[0] - c.lower[0]) / h)) + 3;
    g.ny = static_cast<int>(std::ceil((c.upper[1] - c.lower[1]) / h)) + 3;
    f.x0 = c.lower[0] - h;
    f.y0 = c.lower[1] - h;
    g.kind.assign(g.size(), NodeKind::Inactive);
    std::vector<char> inside(g.size(), 0);
    double x[2];
    for (std::size_t p = 0; p < g.size(); ++p) {
      f.point(p, x);
      inside[p] = contains(x) ? 1 : 0;
    }
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const std::size_t p = g.index(i, j);
        if (inside[p]) {
          g.kind[p] = NodeKind::Unknown;
          continue;
        }
        const bool near = (i > 0 && inside[g.index(i - 1, j)]) || (i + 1 < g.nx && inside[g.index(i + 1, j)]) ||
                          (j > 0 && inside[g.index(i, j - 1)]) || (j + 1 < g.ny && inside[g.index(i, j + 1)]);
        if (near) g.kind[p] = NodeKind::Dirichlet;
      }
  }
  f.values.assign(g.size() * components, 0.0);
  return f;
}

double Domain::weight(const GridFunction& f, std::size_t node) const {
  const StencilGrid& g = f.grid;
  double w = g.hx * g.hy;
  if (spec_.kind == DomainKind::Strip || spec_.kind == DomainKind::Rectangle) {
    const int i = g.col(node), j = g.row(node);
    if (j == 0 || j == g.ny - 1) w *= 0.5;
    if (!g.periodic_x && (i == 0 || i == g.nx - 1)) w *= 0.5;
    return w;
  }
  return g.kind[node] == NodeKind::Unknown ? w : 0.0;
}

}  // namespace homobl
