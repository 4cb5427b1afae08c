#include <cmath>
#include <fmt/format.h>

#include "bl_common.hpp"
#include "homobl/error.hpp"
#include "homobl/stencil.hpp"

namespace homobl {

namespace detail {

void finish_decay(BLSolution& sol, const std::vector<double>& row_energy, const std::vector<double>& face_energy) {
  const int ny = sol.rows;
  sol.t.resize(ny);
  sol.F.assign(ny, 0.0);
  for (int j = 0; j < ny; ++j) sol.t[j] = sol.a + j * sol.dz;
  // suffix sums of the trapezoid rule in t, compensated so that the far tail
  // is not swamped by rounding of the near-boundary energy
  CompensatedSum acc;
  for (int j = ny - 2; j >= 0; --j) {
    acc.add(0.5 * sol.dz * (row_energy[j] + row_energy[j + 1]));
    acc.add(sol.dz * face_energy[j]);
    sol.F[j] = acc.value();
  }
  const double F0 = sol.F[0];
  const int half = (ny - 1) / 2;
  // a constant trace leaves only solver noise in F; its ratio means nothing
  double vmax = 0.0;
  for (double v : sol.V) vmax = std::max(vmax, std::abs(v));
  const bool flat = F0 <= kFlatEnergy * (1.0 + vmax * vmax);
  sol.decay_ratio = flat ? 0.0 : sol.F[half] / F0;
  sol.truncation_warning = sol.decay_ratio > kTruncationRatio;
  if (flat) {
    // nothing to decay: the layer is constant
    sol.decay = DecayFit{};
    sol.decay.kind = DecayClass::Exponential;
    return;
  }
  std::vector<double> t, F;
  const double t_end = sol.a + 2.0 * sol.height / 3.0;
  for (int j = 0; j < ny; ++j) {
    if (sol.t[j] > t_end + 1e-12) break;
    t.push_back(sol.t[j]);
    F.push_back(sol.F[j]);
  }
  sol.decay = classify_decay(t, F, sol.a, 1e-10 * F0);
}

std::vector<double> top_mean(const BLSolution& sol) {
  std::vector<double> m(sol.components, 0.0);
  for (int c = 0; c < sol.components; ++c) {
    CompensatedSum s;
    for (int i = 0; i < sol.row_nodes; ++i) s.add(sol.value(sol.rows - 1, i, c));
    m[c] = s.value() / sol.row_nodes;
  }
  return m;
}

}  // namespace detail

std::optional<RationalDirection> rational_direction(std::span<const double> n) {
  if (n.size() != 2) throw UnsupportedError("rational directions are implemented for d = 2");
  const bool swap = std::abs(n[1]) > std::abs(n[0]);
  const double big = swap ? n[1] : n[0], small = swap ? n[0] : n[1];
  if (big == 0.0) throw DomainError("zero normal");
  const double x = std::abs(small / big);
  long long h1 = 1, h2 = 0, k1 = 0, k2 = 1;
  double v = x;
  for (int it = 0; it < 64; ++it) {
    const double a = std::floor(v);
    const long long h = static_cast<long long>(a) * h1 + h2;
    const long long k = static_cast<long long>(a) * k1 + k2;
    if (k > kMaxDenominator) break;
    const double len = std::hypot(static_cast<double>(h), static_cast<double>(k));
    // sine of the angle between (k, h) and (1, x)
    if (std::abs(x * k - h) / (len * std::hypot(1.0, x)) <= kRationalTol) {
      const int sb = big < 0 ? -1 : 1, ss = small < 0 ? -1 : 1;
      RationalDirection d;
      const int p = sb * static_cast<int>(k), q = ss * static_cast<int>(h);
      d.vec = swap ? std::array<int, 2>{q, p} : std::array<int, 2>{p, q};
      d.period = len;
      return d;
    }
    h2 = h1;
    h1 = h;
    k2 = k1;
    k1 = k;
    const double frac = v - a;
    if (frac < 1e-300) break;
    v = 1.0 / frac;
  }
  return std::nullopt;
}

void rotation_rows(std::span<const double> n, double R[2][2]) {
  R[0][0] = -n[1];
  R[0][1] = n[0];
  R[1][0] = n[0];
  R[1][1] = n[1];
}

namespace {

void check_unit(const TensorField& A, std::span<const double> n) {
  if (A.dim() != 2 || n.size() != 2) throw UnsupportedError("boundary layers are implemented for d = 2");
  const double len = std::hypot(n[0], n[1]);
  if (std::abs(len - 1.0) > 1e-12) throw DomainError(fmt::format("normal has length {} instead of 1", len));
}

}  // namespace

StripProblem rotate_to_strip(const TensorField& A, std::span<const double> n, PointFn phi, double a) {
  check_unit(A, n);
  const auto dir = rational_direction(n);
  if (!dir) {
    throw ClassificationError(fmt::format(
        "normal ({}, {}) matches no integer direction with denominator <= {}; use the quasiperiodic solver", n[0],
        n[1], kMaxDenominator));
  }
  StripProblem p;
  p.components = A.components();
  p.normal = {n[0], n[1]};
  p.direction = *dir;
  double R[2][2];
  rotation_rows(n, R);
  const TensorShape shape = A.shape();
  const TensorSpec spec = A.spec();
  p.B = [=](double z1, double z2, std::span<double> out) {
    const double y[2] = {z1 * R[0][0] + z2 * R[1][0], z1 * R[0][1] + z2 * R[1][1]};
    std::vector<double> tmp(shape.entries());
    evaluate_spec(spec, y, tmp);
    rotate_entries(shape, R, tmp, out);
  };
  p.psi = [=, phi = std::move(phi)](double z1, std::span<double> out) {
    const double y[2] = {z1 * R[0][0] + a * R[1][0], z1 * R[0][1] + a * R[1][1]};
    phi(y, out);
  };
  return p;
}

BLSolution solve_strip_rational(const StripProblem& problem, double a, const StripOptions& opts) {
  const int N = problem.components;
  const double T = problem.direction.period;
  const int nx = std::max(4, static_cast<int>(std::ceil(opts.resolution * T - 1e-9)));
  const double hx = T / nx;
  const double dz = opts.dz > 0.0 ? opts.dz : hx;
  double L = opts.height > 0.0 ? opts.height : 10.0 * T;
  if (!(L > 0.0)) throw DomainError("boundary-layer height must be positive");
  const TensorShape shape{2, N};

  std::vector<double> trace(nx * N);
  for (int i = 0; i < nx; ++i) problem.psi(i * hx, std::span<double>(trace.data() + i * N, N));

  BLSolution sol;
  for (int doubling = 0;; ++doubling) {
    const int ny = std::max(3, static_cast<int>(std::lround(L / dz)) + 1);
    const double hy = L / (ny - 1);
    StencilGrid g;
    g.nx = nx;
    g.ny = ny;
    g.hx = hx;
    g.hy = hy;
    g.periodic_x = true;
    g.neumann_top = true;
    g.kind.assign(g.size(), NodeKind::Unknown);
    for (int i = 0; i < nx; ++i) g.kind[g.index(i, 0)] = NodeKind::Dirichlet;
    std::vector<double> coeffs(g.size() * shape.entries());
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i)
        problem.B(i * hx, a + j * hy,
                  std::span<double>(coeffs.data() + g.index(i, j) * shape.entries(), shape.entries()));
    std::vector<double> boundary(g.size() * N, 0.0);
    std::copy(trace.begin(), trace.end(), boundary.begin());
    const DivergenceOperator op(g, N, std::move(coeffs));
    FieldSolve fs = solve_dirichlet(op, {}, boundary, opts.solver, "boundary-layer strip solve");

    sol = BLSolution{};
    sol.path = "rational";
    sol.components = N;
    sol.normal = problem.normal;
    sol.a = a;
    sol.height = L;
    sol.row_nodes = nx;
    sol.rows = ny;
    sol.row_spacing = hx;
    sol.dz = hy;
    sol.V = std::move(fs.u);
    sol.stats = fs.stats;
    sol.doublings = doubling;

    std::vector<double> row_e(ny, 0.0), face_e(ny, 0.0);
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i)
        for (int c = 0; c < N; ++c) {
          const double dx = (sol.value(j, (i + 1) % nx, c) - sol.value(j, i, c)) / hx;
          row_e[j] += dx * dx * hx;
          if (j + 1 < ny) {
            const double dy = (sol.value(j + 1, i, c) - sol.value(j, i, c)) / hy;
            face_e[j] += dy * dy * hx;
          }
        }
    detail::finish_decay(sol, row_e, face_e);
    if (!opts.auto_height || sol.decay_ratio < kDecayTarget || doubling >= opts.max_doublings) break;
    L *= 2.0;
  }
  sol.U_inf = detail::top_mean(sol);
  return sol;
}

}  // namespace homobl
