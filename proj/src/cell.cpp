#include "homobl/cell.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "homobl/error.hpp"
#include "homobl/parallel.hpp"

namespace homobl {

namespace {

DivergenceOperator torus_operator(const TensorField& A) {
  if (A.dim() != 2) throw UnsupportedError("cell solves are implemented for d = 2 only");
  return DivergenceOperator(StencilGrid::torus(A.resolution()), A.components(), A.values().data());
}

std::vector<double> column(const TorusField& f, int N, int k) {
  const std::size_t n = f.grid().size();
  std::vector<double> out(n * N);
  for (std::size_t p = 0; p < n; ++p) {
    const auto v = f.at(p);
    for (int i = 0; i < N; ++i) out[p * N + i] = v[i * N + k];
  }
  return out;
}

void check_fields(const TensorField& A, const std::vector<TorusField>& fields, std::size_t count,
                  const char* what) {
  const int N = A.components();
  if (fields.size() != count) throw ShapeError(fmt::format("{}: expected {} fields, got {}", what, count, fields.size()));
  for (const auto& f : fields) {
    if (!(f.grid() == A.grid()) || f.components() != N * N)
      throw ShapeError(fmt::format("{}: field grid or size does not match the coefficient grid", what));
  }
}

// Flux (A grad u)_a at a node: the two adjacent face fluxes averaged, plus
// the mixed terms.
void node_flux(const DivergenceOperator& op, std::size_t p, int a, std::span<const double> u,
               std::span<const double> slope, std::span<double> out) {
  const int N = op.components();
  std::vector<double> f1(N), f2(N), fc(N);
  op.face_flux(p, a, u, slope, f1);
  const long long m = op.grid().neighbor(p, a, -1);
  if (m >= 0) {
    op.face_flux(static_cast<std::size_t>(m), a, u, slope, f2);
  } else {
    f2 = f1;
  }
  op.cross_flux(p, a, u, slope, fc);
  for (int i = 0; i < N; ++i) out[i] = 0.5 * (f1[i] + f2[i]) + fc[i];
}

}  // namespace

std::vector<TorusField> solve_cell(const TensorField& A, const SolveOptions& opts,
                                   std::vector<SolveStats>* stats, int threads) {
  const DivergenceOperator op = torus_operator(A);
  const int d = 2, N = A.components();
  const std::size_t n = A.grid().size();
  std::vector<TorusField> chi(d, TorusField(A.grid(), N * N));
  std::vector<SolveStats> st(d * N);
  parallel_for(static_cast<std::size_t>(d * N), threads, [&](std::size_t job) {
    const int g = static_cast<int>(job) / N, k = static_cast<int>(job) % N;
    std::vector<double> slope(d * N, 0.0), zero(n * N, 0.0), rhs(n * N);
    slope[g * N + k] = 1.0;
    op.apply(zero, rhs, slope);
    for (double& v : rhs) v = -v;
    FieldSolve s = solve_periodic(op, std::move(rhs), opts, "cell problem");
    st[job] = s.stats;
    for (std::size_t p = 0; p < n; ++p)
      for (int i = 0; i < N; ++i) chi[g].at(p)[i * N + k] = s.u[p * N + i];
  });
  if (stats) *stats = std::move(st);
  return chi;
}

std::vector<double> homogenized_tensor(const TensorField& A, const std::vector<TorusField>& chi) {
  check_fields(A, chi, 2, "homogenized_tensor");
  const DivergenceOperator op = torus_operator(A);
  const int d = 2, N = A.components();
  const TensorShape& sh = A.shape();
  const std::size_t n = A.grid().size();
  std::vector<double> A0(sh.entries(), 0.0);
  std::vector<double> flux(N), slope(d * N);
  for (int b = 0; b < d; ++b) {
    for (int j = 0; j < N; ++j) {
      const std::vector<double> u = column(chi[b], N, j);
      std::fill(slope.begin(), slope.end(), 0.0);
      slope[b * N + j] = 1.0;
      std::vector<CompensatedSum> sums(d * N);
      for (std::size_t p = 0; p < n; ++p)
        for (int a = 0; a < d; ++a) {
          node_flux(op, p, a, u, slope, flux);
          for (int i = 0; i < N; ++i) sums[a * N + i].add(flux[i]);
        }
      for (int a = 0; a < d; ++a)
        for (int i = 0; i < N; ++i) A0[sh.index(a, b, i, j)] = sums[a * N + i].value() / static_cast<double>(n);
    }
  }
  return A0;
}

UpsilonResult solve_upsilon(const TensorField& A, const std::vector<TorusField>& chi,
                            std::span<const double> A0, const SolveOptions& opts, int threads) {
  check_fields(A, chi, 2, "solve_upsilon");
  const DivergenceOperator op = torus_operator(A);
  const int d = 2, N = A.components();
  const TensorShape& sh = A.shape();
  if (static_cast<int>(A0.size()) != sh.entries()) throw ShapeError("solve_upsilon: A0 has the wrong size");
  const TorusGrid& grid = A.grid();
  const std::size_t n = grid.size();
  const double h = grid.spacing();

  UpsilonResult res;
  res.B.assign(d * d, TorusField(grid, N * N));
  std::vector<double> flux(N), slope(d * N);
  for (int b = 0; b < d; ++b) {
    for (int j = 0; j < N; ++j) {
      const std::vector<double> u = column(chi[b], N, j);
      std::fill(slope.begin(), slope.end(), 0.0);
      slope[b * N + j] = 1.0;
      for (std::size_t p = 0; p < n; ++p)
        for (int a = 0; a < d; ++a) {
          node_flux(op, p, a, u, slope, flux);
          auto Bp = res.B[a * d + b].at(p);
          for (int i = 0; i < N; ++i) Bp[i * N + j] = flux[i];
        }
    }
  }
  // divergence part d_g (A^{ga} chi^b), centred differences
  auto product = [&](std::size_t q, int g, int a, int b, int i, int j) {
    double s = 0.0;
    for (int k = 0; k < N; ++k) s += A.entry(q, g, a, i, k) * chi[b].at(q)[k * N + j];
    return s;
  };
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (std::size_t p = 0; p < n; ++p) {
        auto Bp = res.B[a * d + b].at(p);
        for (int g = 0; g < d; ++g) {
          const std::size_t qp = grid.neighbor(p, g, 1), qm = grid.neighbor(p, g, -1);
          for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j)
              Bp[i * N + j] += (product(qp, g, a, b, i, j) - product(qm, g, a, b, i, j)) / (2.0 * h);
        }
      }

  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
          const double m = res.B[a * d + b].mean(i * N + j);
          res.mean_b_defect = std::max(res.mean_b_defect, std::abs(m - A0[sh.index(a, b, i, j)]));
        }

  res.upsilon.assign(d * d, TorusField(grid, N * N));
  res.stats.resize(d * d * N);
  parallel_for(static_cast<std::size_t>(d * d * N), threads, [&](std::size_t job) {
    const int ab = static_cast<int>(job) / N, j = static_cast<int>(job) % N;
    std::vector<double> rhs(n * N);
    for (std::size_t p = 0; p < n; ++p)
      for (int i = 0; i < N; ++i) rhs[p * N + i] = h * h * res.B[ab].at(p)[i * N + j];
    FieldSolve s = solve_periodic(op, std::move(rhs), opts, "second corrector");
    res.stats[job] = s.stats;
    for (std::size_t p = 0; p < n; ++p)
      for (int i = 0; i < N; ++i) res.upsilon[ab].at(p)[i * N + j] = s.u[p * N + i];
  });
  return res;
}

std::vector<double> third_order_coeffs(const TensorField& A, const std::vector<TorusField>& chi,
                                       const std::vector<TorusField>& upsilon) {
  check_fields(A, chi, 2, "third_order_coeffs");
  check_fields(A, upsilon, 4, "third_order_coeffs");
  const DivergenceOperator op = torus_operator(A);
  const int d = 2, N = A.components();
  const std::size_t n = A.grid().size();
  CorrectorSet idx;
  idx.shape = A.shape();
  std::vector<double> c(d * d * d * N * N, 0.0);
  std::vector<double> flux(N);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int j = 0; j < N; ++j) {
        const std::vector<double> u = column(upsilon[a * d + b], N, j);
        for (int g = 0; g < d; ++g) {
          std::vector<CompensatedSum> sums(N);
          for (std::size_t p = 0; p < n; ++p) {
            node_flux(op, p, g, u, {}, flux);
            for (int i = 0; i < N; ++i) {
              double s = flux[i];
              for (int k = 0; k < N; ++k) s += A.entry(p, a, b, i, k) * chi[g].at(p)[k * N + j];
              sums[i].add(s);
            }
          }
          for (int i = 0; i < N; ++i) c[idx.c_index(a, b, g, i, j)] = sums[i].value() / static_cast<double>(n);
        }
      }
  return c;
}

CorrectorSet compute_correctors(const TensorField& A, const SolveOptions& opts, bool second_order,
                                int threads) {
  CorrectorSet cs;
  cs.shape = A.shape();
  cs.resolution = A.resolution();
  cs.chi = solve_cell(A, opts, &cs.chi_stats, threads);
  cs.A0 = homogenized_tensor(A, cs.chi);
  if (second_order) {
    UpsilonResult up = solve_upsilon(A, cs.chi, cs.A0, opts, threads);
    cs.B = std::move(up.B);
    cs.upsilon = std::move(up.upsilon);
    cs.upsilon_stats = std::move(up.stats);
    cs.mean_b_defect = up.mean_b_defect;
    cs.c = third_order_coeffs(A, cs.chi, cs.upsilon);
  }
  return cs;
}

std::vector<double> assemble_expansion(const GridFunction& u0, std::span<const double> ubar1,
                                       const CorrectorSet& cs, double eps, int order) {
  if (order < 0 || order > 2) throw UnsupportedError(fmt::format("expansion order {} is not supported", order));
  std::vector<double> out = u0.values;
  if (order == 0) return out;
  if (order == 2 && !cs.has_second_order())
    throw UnsupportedError("order-2 expansion needs second correctors");
  const StencilGrid& g = u0.grid;
  const int N = u0.components, d = 2;
  if (cs.shape.components != N || cs.chi.size() != 2) throw ShapeError("correctors do not match the field");
  const std::size_t n = g.size();
  if (u0.values.size() != n * N) throw ShapeError("field size does not match its grid");
  if (!ubar1.empty() && ubar1.size() != n * N) throw ShapeError("ubar1 size does not match the grid");

  std::vector<std::vector<double>> du(d, std::vector<double>(n * N));
  for (int a = 0; a < d; ++a) nodal_gradient(g, N, u0.values, a, du[a]);
  std::vector<std::vector<double>> d2u, dub;
  if (order == 2) {
    d2u.assign(d * d, std::vector<double>(n * N));
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) nodal_gradient(g, N, du[b], a, d2u[a * d + b]);
    if (!ubar1.empty()) {
      dub.assign(d, std::vector<double>(n * N));
      for (int a = 0; a < d; ++a) nodal_gradient(g, N, ubar1, a, dub[a]);
    }
  }

  std::vector<double> m(N * N);
  double x[2], y[2];
  for (std::size_t p = 0; p < n; ++p) {
    if (!g.active(p)) continue;
    u0.point(p, x);
    y[0] = x[0] / eps;
    y[1] = x[1] / eps;
    for (int a = 0; a < d; ++a) {
      cs.chi[a].interpolate(y, m);
      for (int i = 0; i < N; ++i) {
        double s1 = 0.0, s2 = 0.0;
        for (int k = 0; k < N; ++k) {
          s1 += m[i * N + k] * du[a][p * N + k];
          if (!dub.empty()) s2 += m[i * N + k] * dub[a][p * N + k];
        }
        out[p * N + i] += eps * s1 + eps * eps * s2;
      }
    }
    if (!ubar1.empty())
      for (int i = 0; i < N; ++i) out[p * N + i] += eps * ubar1[p * N + i];
    if (order == 2) {
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) {
          cs.upsilon[a * d + b].interpolate(y, m);
          for (int i = 0; i < N; ++i) {
            double s = 0.0;
            for (int k = 0; k < N; ++k) s += m[i * N + k] * d2u[a * d + b][p * N + k];
            out[p * N + i] += eps * eps * s;
          }
        }
    }
  }
  return out;
}

}  // namespace homobl
