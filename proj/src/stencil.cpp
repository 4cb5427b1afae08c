#include "homobl/stencil.hpp"

#include <algorithm>
#include <cmath>

#include "homobl/error.hpp"

namespace homobl {

StencilGrid StencilGrid::torus(int resolution) {
  StencilGrid g;
  g.nx = g.ny = resolution;
  g.hx = g.hy = 1.0 / resolution;
  g.periodic_x = g.periodic_y = true;
  g.kind.assign(g.size(), NodeKind::Unknown);
  return g;
}

long long StencilGrid::neighbor(std::size_t node, int axis, int shift) const {
  int i = col(node), j = row(node);
  if (axis == 0) {
    i += shift;
    if (i < 0 || i >= nx) {
      if (!periodic_x) return -1;
      i = (i + nx) % nx;
    }
  } else {
    j += shift;
    if (j < 0 || j >= ny) {
      if (!periodic_y) return -1;
      j = (j + ny) % ny;
    }
  }
  const std::size_t q = index(i, j);
  return kind[q] == NodeKind::Inactive ? -1 : static_cast<long long>(q);
}

double StencilGrid::volume(std::size_t node) const {
  double v = hx * hy;
  if (neumann_top && !periodic_y && row(node) == ny - 1) v *= 0.5;
  return v;
}

std::size_t StencilGrid::count(NodeKind k) const { return static_cast<std::size_t>(std::count(kind.begin(), kind.end(), k)); }

DivergenceOperator::DivergenceOperator(StencilGrid grid, int components, std::vector<double> node_coeffs)
    : grid_(std::move(grid)), N_(components), shape_{2, components}, coeffs_(std::move(node_coeffs)) {
  const std::size_t n = grid_.size();
  if (grid_.kind.size() != n) throw ShapeError("stencil grid node roles have the wrong size");
  if (coeffs_.size() != n * static_cast<std::size_t>(shape_.entries()))
    throw ShapeError("coefficient array does not match the stencil grid");
  const int NN = N_ * N_;
  for (int a = 0; a < 2; ++a) {
    for (int s = 0; s < 2; ++s) {
      nbr_[a][s].resize(n);
      for (std::size_t p = 0; p < n; ++p)
        nbr_[a][s][p] = grid_.active(p) ? grid_.neighbor(p, a, s ? 1 : -1) : -1;
    }
    face_[a].assign(n * NN, 0.0);
    for (std::size_t p = 0; p < n; ++p) {
      const long long q = nbr_[a][1][p];
      if (q < 0) continue;
      const auto cp = coeffs(p), cq = coeffs(static_cast<std::size_t>(q));
      for (int i = 0; i < N_; ++i)
        for (int j = 0; j < N_; ++j) {
          const double u = cp[shape_.index(a, a, i, j)], v = cq[shape_.index(a, a, i, j)];
          double k = 0.5 * (u + v);
          if (N_ == 1 && u > 0.0 && v > 0.0) k = 2.0 * u * v / (u + v);
          face_[a][p * NN + i * N_ + j] = k;
        }
    }
  }
  for (std::size_t p = 0; p < n && !has_cross_; ++p) {
    if (!grid_.active(p)) continue;
    const auto c = coeffs(p);
    for (int i = 0; i < N_ && !has_cross_; ++i)
      for (int j = 0; j < N_; ++j)
        if (c[shape_.index(0, 1, i, j)] != 0.0 || c[shape_.index(1, 0, i, j)] != 0.0) {
          has_cross_ = true;
          break;
        }
  }
  for (std::size_t p = 0; p < n && symmetric_; ++p) {
    const auto c = coeffs(p);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int i = 0; i < N_; ++i)
          for (int j = 0; j < N_; ++j) {
            const double u = c[shape_.index(a, b, i, j)], v = c[shape_.index(b, a, j, i)];
            if (std::abs(u - v) > 1e-14 * std::max({1.0, std::abs(u), std::abs(v)})) symmetric_ = false;
          }
  }
  diag_.assign(n * N_, 0.0);
  for (std::size_t p = 0; p < n; ++p) {
    for (int a = 0; a < 2; ++a) {
      const long long q = nbr_[a][1][p];
      if (q < 0) continue;
      const double w = face_weight(p, a);
      for (int c = 0; c < N_; ++c) {
        const double k = w * face_[a][p * NN + c * N_ + c];
        diag_[p * N_ + c] += k;
        diag_[static_cast<std::size_t>(q) * N_ + c] += k;
      }
    }
  }
}

double DivergenceOperator::face_weight(std::size_t node, int axis) const {
  if (axis == 0) {
    double w = grid_.hy / grid_.hx;
    if (grid_.neumann_top && !grid_.periodic_y && grid_.row(node) == grid_.ny - 1) w *= 0.5;
    return w;
  }
  return grid_.hx / grid_.hy;
}

void DivergenceOperator::gradient(std::size_t node, int axis, std::span<const double> u,
                                  std::span<const double> slope, std::span<double> out) const {
  const long long m = nbr_[axis][0][node], q = nbr_[axis][1][node];
  const double h = grid_.spacing(axis);
  for (int c = 0; c < N_; ++c) {
    double g = 0.0;
    if (m >= 0 && q >= 0) {
      g = (u[static_cast<std::size_t>(q) * N_ + c] - u[static_cast<std::size_t>(m) * N_ + c]) / (2.0 * h);
    } else if (q >= 0) {
      g = (u[static_cast<std::size_t>(q) * N_ + c] - u[node * N_ + c]) / h;
    } else if (m >= 0) {
      g = (u[node * N_ + c] - u[static_cast<std::size_t>(m) * N_ + c]) / h;
    }
    if (!slope.empty() && (m >= 0 || q >= 0)) g += slope[axis * N_ + c];
    out[c] = g;
  }
}

void DivergenceOperator::face_flux(std::size_t node, int axis, std::span<const double> u,
                                   std::span<const double> slope, std::span<double> out) const {
  const long long q = nbr_[axis][1][node];
  const double h = grid_.spacing(axis);
  for (int i = 0; i < N_; ++i) out[i] = 0.0;
  if (q < 0) return;
  const double* K = face_[axis].data() + node * N_ * N_;
  for (int j = 0; j < N_; ++j) {
    double diff = u[static_cast<std::size_t>(q) * N_ + j] - u[node * N_ + j];
    if (!slope.empty()) diff += h * slope[axis * N_ + j];
    for (int i = 0; i < N_; ++i) out[i] += K[i * N_ + j] * diff / h;
  }
}

void DivergenceOperator::cross_flux(std::size_t node, int axis, std::span<const double> u,
                                    std::span<const double> slope, std::span<double> out) const {
  for (int i = 0; i < N_; ++i) out[i] = 0.0;
  if (!has_cross_) return;
  std::vector<double> g(N_);
  const int other = 1 - axis;
  gradient(node, other, u, slope, g);
  const auto c = coeffs(node);
  for (int i = 0; i < N_; ++i)
    for (int j = 0; j < N_; ++j) out[i] += c[shape_.index(axis, other, i, j)] * g[j];
}

void DivergenceOperator::apply(std::span<const double> u, std::span<double> out,
                               std::span<const double> slope) const {
  const std::size_t n = grid_.size();
  const int NN = N_ * N_;
  std::fill(out.begin(), out.end(), 0.0);
  const bool sl = !slope.empty();

  if (N_ == 1 && !sl) {
    for (int a = 0; a < 2; ++a) {
      const double w_base = a == 0 ? grid_.hy / grid_.hx : grid_.hx / grid_.hy;
      const long long* nb = nbr_[a][1].data();
      const double* K = face_[a].data();
      const bool half_top = a == 0 && grid_.neumann_top && !grid_.periodic_y;
      const std::size_t top_start = static_cast<std::size_t>(grid_.nx) * (grid_.ny - 1);
      for (std::size_t p = 0; p < n; ++p) {
        const long long q = nb[p];
        if (q < 0) continue;
        const double w = (half_top && p >= top_start) ? 0.5 * w_base : w_base;
        const double flux = w * K[p] * (u[static_cast<std::size_t>(q)] - u[p]);
        out[p] -= flux;
        out[static_cast<std::size_t>(q)] += flux;
      }
    }
  } else {
    std::vector<double> diff(N_);
    for (int a = 0; a < 2; ++a) {
      const double h = grid_.spacing(a);
      for (std::size_t p = 0; p < n; ++p) {
        const long long q = nbr_[a][1][p];
        if (q < 0) continue;
        const double w = face_weight(p, a);
        for (int j = 0; j < N_; ++j) {
          diff[j] = u[static_cast<std::size_t>(q) * N_ + j] - u[p * N_ + j];
          if (sl) diff[j] += h * slope[a * N_ + j];
        }
        const double* K = face_[a].data() + p * NN;
        for (int i = 0; i < N_; ++i) {
          double flux = 0.0;
          for (int j = 0; j < N_; ++j) flux += K[i * N_ + j] * diff[j];
          flux *= w;
          out[p * N_ + i] -= flux;
          out[static_cast<std::size_t>(q) * N_ + i] += flux;
        }
      }
    }
  }

  if (!has_cross_) return;
  // Mixed terms: out += D_a^T (vol A^{ab} D_b u), a != b.
  std::vector<double> g(N_), flux(N_);
  for (std::size_t p = 0; p < n; ++p) {
    if (!grid_.active(p)) continue;
    const double vol = grid_.volume(p);
    const auto c = coeffs(p);
    for (int a = 0; a < 2; ++a) {
      const int b = 1 - a;
      gradient(p, b, u, slope, g);
      for (int i = 0; i < N_; ++i) {
        double s = 0.0;
        for (int j = 0; j < N_; ++j) s += c[shape_.index(a, b, i, j)] * g[j];
        flux[i] = vol * s;
      }
      // transpose of the difference quotient used for d_a at p
      const long long m = nbr_[a][0][p], q = nbr_[a][1][p];
      const double h = grid_.spacing(a);
      for (int i = 0; i < N_; ++i) {
        if (m >= 0 && q >= 0) {
          out[static_cast<std::size_t>(q) * N_ + i] += flux[i] / (2.0 * h);
          out[static_cast<std::size_t>(m) * N_ + i] -= flux[i] / (2.0 * h);
        } else if (q >= 0) {
          out[static_cast<std::size_t>(q) * N_ + i] += flux[i] / h;
          out[p * N_ + i] -= flux[i] / h;
        } else if (m >= 0) {
          out[p * N_ + i] += flux[i] / h;
          out[static_cast<std::size_t>(m) * N_ + i] -= flux[i] / h;
        }
      }
    }
  }
}

void DivergenceOperator::apply_unknowns(std::span<const double> u, std::span<double> out) const {
  apply(u, out);
  for (std::size_t p = 0; p < grid_.size(); ++p)
    if (grid_.kind[p] != NodeKind::Unknown)
      for (int c = 0; c < N_; ++c) out[p * N_ + c] = 0.0;
}

void DivergenceOperator::jacobi(std::span<const double> r, std::span<double> z) const {
  for (std::size_t p = 0; p < grid_.size(); ++p) {
    const bool unknown = grid_.kind[p] == NodeKind::Unknown;
    for (int c = 0; c < N_; ++c) {
      const std::size_t k = p * N_ + c;
      z[k] = unknown ? (diag_[k] > 0.0 ? r[k] / diag_[k] : r[k]) : 0.0;
    }
  }
}

void nodal_gradient(const StencilGrid& g, int components, std::span<const double> u, int axis,
                    std::span<double> out) {
  const int N = components;
  const double h = g.spacing(axis);
  for (std::size_t p = 0; p < g.size(); ++p) {
    for (int c = 0; c < N; ++c) out[p * N + c] = 0.0;
    if (!g.active(p)) continue;
    const long long m = g.neighbor(p, axis, -1), q = g.neighbor(p, axis, 1);
    for (int c = 0; c < N; ++c) {
      if (m >= 0 && q >= 0)
        out[p * N + c] = (u[static_cast<std::size_t>(q) * N + c] - u[static_cast<std::size_t>(m) * N + c]) / (2.0 * h);
      else if (q >= 0)
        out[p * N + c] = (u[static_cast<std::size_t>(q) * N + c] - u[p * N + c]) / h;
      else if (m >= 0)
        out[p * N + c] = (u[p * N + c] - u[static_cast<std::size_t>(m) * N + c]) / h;
    }
  }
}

FieldSolve solve_dirichlet(const DivergenceOperator& op, std::span<const double> f,
                           std::span<const double> boundary, const SolveOptions& opts, const char* what) {
  const StencilGrid& g = op.grid();
  const int N = op.components();
  const std::size_t len = g.size() * N;
  std::vector<double> ub(len, 0.0), Kub(len);
  for (std::size_t p = 0; p < g.size(); ++p)
    if (g.kind[p] == NodeKind::Dirichlet)
      for (int c = 0; c < N; ++c) ub[p * N + c] = boundary[p * N + c];
  op.apply(ub, Kub);
  std::vector<double> b(len, 0.0);
  for (std::size_t p = 0; p < g.size(); ++p) {
    if (g.kind[p] != NodeKind::Unknown) continue;
    const double vol = g.volume(p);
    for (int c = 0; c < N; ++c) {
      const std::size_t k = p * N + c;
      b[k] = (f.empty() ? 0.0 : vol * f[k]) - Kub[k];
    }
  }
  FieldSolve out;
  std::vector<double> x(len, 0.0);
  auto A = [&](std::span<const double> in, std::span<double> o) { op.apply_unknowns(in, o); };
  auto M = [&](std::span<const double> in, std::span<double> o) { op.jacobi(in, o); };
  out.stats = op.symmetric() ? pcg(A, M, b, x, opts) : bicgstab(A, M, b, x, opts);
  require_converged(out.stats, what);
  for (std::size_t k = 0; k < len; ++k) x[k] += ub[k];
  out.u = std::move(x);
  return out;
}

FieldSolve solve_periodic(const DivergenceOperator& op, std::vector<double> rhs, const SolveOptions& opts,
                          const char* what) {
  const StencilGrid& g = op.grid();
  if (!g.periodic_x || !g.periodic_y) throw ShapeError("solve_periodic needs a fully periodic grid");
  const int N = op.components();
  const std::size_t n = g.size();
  auto project = [&](std::vector<double>& v) {
    for (int c = 0; c < N; ++c) {
      double m = 0.0;
      for (std::size_t p = 0; p < n; ++p) m += v[p * N + c];
      m /= static_cast<double>(n);
      for (std::size_t p = 0; p < n; ++p) v[p * N + c] -= m;
    }
  };
  project(rhs);
  FieldSolve out;
  std::vector<double> x(n * N, 0.0);
  auto A = [&](std::span<const double> in, std::span<double> o) { op.apply(in, o); };
  auto M = [&](std::span<const double> in, std::span<double> o) { op.jacobi(in, o); };
  out.stats = op.symmetric() ? pcg(A, M, rhs, x, opts) : bicgstab(A, M, rhs, x, opts);
  require_converged(out.stats, what);
  project(x);
  out.u = std::move(x);
  return out;
}

}  // namespace homobl
