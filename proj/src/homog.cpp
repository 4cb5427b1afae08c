#include "homobl/homog.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>

#include "homobl/error.hpp"
#include "homobl/parallel.hpp"

namespace homobl {

namespace {

using NodeBoundary = std::function<void(std::size_t node, const double x[2], std::span<double> out)>;

// Fills coefficients, boundary values and the volume-scaled source on `grid`
// and solves the Dirichlet problem in place.
SolveStats solve_on_grid(GridFunction& grid, const std::vector<double>& coeffs, const NodeBoundary& boundary,
                         std::span<const double> f_nodal, const SolveOptions& opts, const char* what) {
  const int N = grid.components;
  const StencilGrid& g = grid.grid;
  std::vector<double> bvals(g.size() * N, 0.0);
  double x[2];
  for (std::size_t p = 0; p < g.size(); ++p) {
    if (g.kind[p] != NodeKind::Dirichlet) continue;
    grid.point(p, x);
    boundary(p, x, std::span<double>(bvals.data() + p * N, N));
  }
  const DivergenceOperator op(g, N, coeffs);
  FieldSolve s = solve_dirichlet(op, f_nodal, bvals, opts, what);
  grid.values = std::move(s.u);
  return s.stats;
}

std::vector<double> nodal_source(const GridFunction& grid, const PointFn& f) {
  const int N = grid.components;
  std::vector<double> out;
  if (!f) return out;
  out.assign(grid.grid.size() * N, 0.0);
  double x[2];
  for (std::size_t p = 0; p < grid.grid.size(); ++p) {
    if (grid.grid.kind[p] != NodeKind::Unknown) continue;
    grid.point(p, x);
    f(std::span<const double>(x, 2), std::span<double>(out.data() + p * N, N));
  }
  return out;
}

std::vector<double> constant_coeffs(std::span<const double> A0, std::size_t nodes) {
  std::vector<double> c(nodes * A0.size());
  for (std::size_t p = 0; p < nodes; ++p) std::copy(A0.begin(), A0.end(), c.begin() + p * A0.size());
  return c;
}

bool reciprocal_integer(double eps) {
  const double r = 1.0 / eps;
  return std::abs(r - std::round(r)) <= 1e-9 * r;
}

}  // namespace

FineSolution solve_fine(const TensorField& A, const DirichletDatum& phi, const PointFn& f, double eps,
                        const Domain& domain, double h, const SolveOptions& opts) {
  if (!(eps > 0.0 && eps <= 1.0)) throw DomainError(fmt::format("eps = {} is outside (0, 1]", eps));
  const double hmax = eps / kMinCellsPerEps;
  if (h > hmax * (1.0 + 1e-12)) {
    throw ResolutionError(fmt::format("mesh size h = {} does not resolve eps = {}: need h <= eps/{} = {}", h, eps,
                                      kMinCellsPerEps, hmax));
  }
  if (A.dim() != 2) throw UnsupportedError("fine solves are implemented for d = 2");
  const int N = A.components();
  if (phi.components() != N) throw ShapeError("datum and tensor differ in the number of components");
  FineSolution sol;
  sol.eps = eps;
  sol.u = domain.make_grid(h, N);
  const StencilGrid& g = sol.u.grid;
  const int E = A.shape().entries();
  std::vector<double> coeffs(g.size() * E);
  double x[2];
  for (std::size_t p = 0; p < g.size(); ++p) {
    sol.u.point(p, x);
    const double y[2] = {x[0] / eps, x[1] / eps};
    evaluate_spec(A.spec(), y, std::span<double>(coeffs.data() + p * E, E));
  }
  const auto boundary = [&](std::size_t, const double xn[2], std::span<double> out) {
    const BoundaryPoint bp = domain.project(std::span<const double>(xn, 2));
    std::vector<double> y = {bp.x[0] / eps, bp.x[1] / eps};
    phi.evaluate(bp.x, y, out);
  };
  const std::vector<double> fn = nodal_source(sol.u, f);
  sol.stats = solve_on_grid(sol.u, coeffs, boundary, fn, opts, "fine-scale solve");
  return sol;
}

HomogenizedSolution solve_homogenized(std::span<const double> A0, int components, const BoundaryFn& g,
                                      const PointFn& f, const Domain& domain, double h, const SolveOptions& opts) {
  const TensorShape shape{2, components};
  if (static_cast<int>(A0.size()) != shape.entries()) throw ShapeError("A0 has the wrong size");
  HomogenizedSolution sol;
  sol.A0.assign(A0.begin(), A0.end());
  sol.u0 = domain.make_grid(h, components);
  const auto boundary = [&](std::size_t, const double xn[2], std::span<double> out) {
    g(domain.project(std::span<const double>(xn, 2)), out);
  };
  const std::vector<double> fn = nodal_source(sol.u0, f);
  sol.stats = solve_on_grid(sol.u0, constant_coeffs(A0, sol.u0.grid.size()), boundary, fn, opts,
                            "homogenized solve");
  return sol;
}

PhiStar::PhiStar(const DirichletDatum& phi, const Domain& domain, std::vector<PhiStarSide> sides)
    : phi_(phi), domain_(domain), sides_(std::move(sides)) {
  if (sides_.size() != domain_.sides().size()) throw ShapeError("phi*: one entry per boundary side expected");
}

void PhiStar::included_value(const BoundaryPoint& p, std::span<double> out) const {
  const PhiStarSide& s = sides_[p.side];
  phi_.slow(p.x, out);
  const auto& terms = phi_.terms();
  for (std::size_t k = 0; k < terms.size(); ++k) {
    const double w = terms[k].weight ? terms[k].weight(p.x) : 1.0;
    for (int i = 0; i < phi_.components(); ++i) out[i] += w * s.tails[k][i];
  }
}

void PhiStar::operator()(const BoundaryPoint& p, std::span<double> out) const {
  if (sides_[p.side].path != "excluded") {
    included_value(p, out);
    return;
  }
  // nearest included point along the boundary is an endpoint of an included side
  double best = std::numeric_limits<double>::infinity();
  BoundaryPoint pick;
  for (std::size_t k = 0; k < sides_.size(); ++k) {
    if (sides_[k].path == "excluded") continue;
    const Side& sd = domain_.sides()[k];
    for (int end = 0; end < 2; ++end) {
      BoundaryPoint q;
      q.side = static_cast<int>(k);
      q.x = end ? sd.p1 : sd.p0;
      q.s = sd.s0 + (end ? sd.length : 0.0);
      q.outward = sd.outward;
      const double d = domain_.arc_distance(p, q);
      if (d < best) {
        best = d;
        pick = q;
      }
    }
  }
  if (!std::isfinite(best)) throw DomainError("phi*: no included boundary point to fill from");
  included_value(pick, out);
}

PhiStar boundary_data_star(const TensorField& A, const DirichletDatum& phi, const Domain& domain, double eps,
                           const PhiStarOptions& opts) {
  if (!(opts.kappa > 0.0)) throw ConfigError({"κ must be positive"});
  if (!(eps > 0.0)) throw DomainError("phi*: eps must be positive");
  const auto& sides = domain.sides();
  std::vector<PhiStarSide> out(sides.size());
  for (std::size_t k = 0; k < sides.size(); ++k) {
    PhiStarSide& s = out[k];
    s.side = static_cast<int>(k);
    s.inward = {-sides[k].outward[0], -sides[k].outward[1]};
    s.offset = (sides[k].p0[0] * s.inward[0] + sides[k].p0[1] * s.inward[1]) / eps;
    if (rational_direction(s.inward)) {
      s.path = "rational";
      continue;
    }
    const DiophantineCertificate c = diophantine_constant(s.inward, opts.truncation, opts.exponent);
    s.kappa_obs = c.kappa_dot;
    s.path = c.kappa_dot >= opts.kappa ? "quasiperiodic" : "excluded";
  }
  if (std::all_of(out.begin(), out.end(), [](const PhiStarSide& s) { return s.path == "excluded"; })) {
    throw ConfigError({fmt::format("κ = {} excludes every boundary normal", opts.kappa)});
  }
  const auto& terms = phi.terms();
  const std::size_t jobs = sides.size() * terms.size();
  for (auto& s : out)
    if (s.path != "excluded") s.tails.resize(terms.size());
  parallel_for(jobs, opts.threads, [&](std::size_t job) {
    const std::size_t k = job / terms.size(), t = job % terms.size();
    PhiStarSide& s = out[k];
    if (s.path == "excluded") return;
    const OscillatingTerm& term = terms[t];
    PointFn profile = [&term](std::span<const double> y, std::span<double> v) { term.evaluate_profile(y, v); };
    const BLSolution sol = solve_boundary_layer(A, s.inward, profile, s.offset, opts.bl);
    s.tails[t] = tail_constant(sol).U_inf;
  });
  return PhiStar(phi, domain, std::move(out));
}

std::vector<std::vector<std::vector<double>>> corrector_tails(const TensorField& A, const CorrectorSet& cs,
                                                               const Domain& domain, double eps,
                                                               const PhiStar& phi_star, const PhiStarOptions& opts) {
  const int N = cs.shape.components, d = 2;
  const auto& sides = phi_star.sides();
  std::vector<std::vector<std::vector<double>>> tails(sides.size(),
                                                      std::vector<std::vector<double>>(d, std::vector<double>(N * N)));
  const std::size_t jobs = sides.size() * d * N;
  parallel_for(jobs, opts.threads, [&](std::size_t job) {
    const std::size_t k = job / (d * N);
    const int a = static_cast<int>(job % (d * N)) / N, col = static_cast<int>(job % N);
    const PhiStarSide& s = sides[k];
    if (s.path == "excluded") return;
    PointFn profile = [&, a, col](std::span<const double> y, std::span<double> v) {
      std::vector<double> m(N * N);
      cs.chi[a].interpolate(y, m);
      for (int i = 0; i < N; ++i) v[i] = m[i * N + col];
    };
    const BLSolution sol = solve_boundary_layer(A, s.inward, profile, s.offset, opts.bl);
    const auto U = tail_constant(sol).U_inf;
    for (int i = 0; i < N; ++i) tails[k][a][i * N + col] = U[i];
  });
  (void)eps;
  // excluded sides borrow from the nearest included side (by midpoint arc distance)
  for (std::size_t k = 0; k < sides.size(); ++k) {
    if (sides[k].path != "excluded") continue;
    const Side& sk = domain.sides()[k];
    BoundaryPoint pk;
    pk.side = static_cast<int>(k);
    pk.s = sk.s0 + 0.5 * sk.length;
    pk.x = {0.5 * (sk.p0[0] + sk.p1[0]), 0.5 * (sk.p0[1] + sk.p1[1])};
    double best = std::numeric_limits<double>::infinity();
    std::size_t pick = k;
    for (std::size_t j = 0; j < sides.size(); ++j) {
      if (sides[j].path == "excluded") continue;
      const Side& sj = domain.sides()[j];
      BoundaryPoint pj;
      pj.side = static_cast<int>(j);
      pj.s = sj.s0 + 0.5 * sj.length;
      pj.x = {0.5 * (sj.p0[0] + sj.p1[0]), 0.5 * (sj.p0[1] + sj.p1[1])};
      const double dist = domain.arc_distance(pk, pj);
      if (dist < best) {
        best = dist;
        pick = j;
      }
    }
    tails[k] = tails[pick];
  }
  return tails;
}

GridFunction solve_ubar1(const CorrectorSet& cs, const GridFunction& u0,
                         const std::vector<std::vector<std::vector<double>>>& chi_tails, const Domain& domain,
                         const SolveOptions& opts) {
  const int N = u0.components, d = 2;
  if (cs.shape.components != N) throw ShapeError("ubar1: correctors and u0 differ in components");
  if (chi_tails.size() != domain.sides().size()) throw ShapeError("ubar1: one tail set per side expected");
  const StencilGrid& g = u0.grid;
  const std::size_t n = g.size();
  std::vector<std::vector<double>> du(d, std::vector<double>(n * N));
  for (int a = 0; a < d; ++a) nodal_gradient(g, N, u0.values, a, du[a]);

  std::vector<double> f;
  if (cs.has_second_order()) {
    f.assign(n * N, 0.0);
    std::vector<double> d2(n * N), d3(n * N);
    for (int b = 0; b < d; ++b)
      for (int gm = 0; gm < d; ++gm) {
        nodal_gradient(g, N, du[gm], b, d2);
        for (int a = 0; a < d; ++a) {
          nodal_gradient(g, N, d2, a, d3);
          for (std::size_t p = 0; p < n; ++p)
            for (int i = 0; i < N; ++i)
              for (int j = 0; j < N; ++j) f[p * N + i] += cs.c[cs.c_index(a, b, gm, i, j)] * d3[p * N + j];
        }
      }
  }

  GridFunction out = u0;
  const auto boundary = [&](std::size_t node, const double xn[2], std::span<double> v) {
    const BoundaryPoint bp = domain.project(std::span<const double>(xn, 2));
    const auto& T = chi_tails[bp.side];
    for (int i = 0; i < N; ++i) {
      double s = 0.0;
      for (int a = 0; a < d; ++a)
        for (int k = 0; k < N; ++k) s += T[a][i * N + k] * du[a][node * N + k];
      v[i] = -s;
    }
  };
  solve_on_grid(out, constant_coeffs(cs.A0, n), boundary, f, opts, "ubar1 solve");
  return out;
}

ErrorNorms error_norms(const GridFunction& u, std::span<const double> v, const Domain& domain, double margin) {
  const int N = u.components;
  const StencilGrid& g = u.grid;
  const std::size_t n = g.size();
  if (v.size() != u.values.size()) throw ShapeError("error_norms: fields differ in size");
  std::vector<double> e(n * N);
  for (std::size_t k = 0; k < e.size(); ++k) e[k] = u.values[k] - v[k];
  ErrorNorms out;
  CompensatedSum l2;
  for (std::size_t p = 0; p < n; ++p) {
    if (!g.active(p)) continue;
    const double w = domain.weight(u, p);
    for (int i = 0; i < N; ++i) l2.add(w * e[p * N + i] * e[p * N + i]);
  }
  out.l2 = std::sqrt(l2.value());

  std::vector<double> gx(n * N), gy(n * N);
  nodal_gradient(g, N, e, 0, gx);
  nodal_gradient(g, N, e, 1, gy);
  CompensatedSum h1;
  std::size_t count = 0;
  double x[2];
  for (std::size_t p = 0; p < n; ++p) {
    if (g.kind[p] != NodeKind::Unknown) continue;
    u.point(p, x);
    if (!domain.contains(x) || domain.distance_to_boundary(x) <= margin) continue;
    ++count;
    for (int i = 0; i < N; ++i) {
      const std::size_t k = p * N + i;
      h1.add(g.hx * g.hy * (e[k] * e[k] + gx[k] * gx[k] + gy[k] * gy[k]));
    }
  }
  if (count == 0) throw DomainError(fmt::format("interior margin {} leaves no grid nodes", margin));
  out.h1_interior = std::sqrt(h1.value());
  return out;
}

SweepRow sweep_point(const SweepSpec& spec, double eps, int cells_per_eps) {
  if (!reciprocal_integer(eps)) throw DomainError(fmt::format("eps = {} is not the reciprocal of an integer", eps));
  if (cells_per_eps < kMinCellsPerEps)
    throw ResolutionError(fmt::format("need at least {} cells per eps, got {}", kMinCellsPerEps, cells_per_eps));
  SweepRow row;
  row.eps = eps;
  row.h = eps / cells_per_eps;
  // correctors on the lattice of the fine mesh, so that A0 is the exact
  // homogenized tensor of the discrete fine operator
  const TensorField A = build_tensor(spec.tensor, cells_per_eps);
  const CorrectorSet cs = compute_correctors(A, spec.solver, spec.order >= 1);
  const Domain domain(spec.domain, eps);
  const PhiStar phi_star = boundary_data_star(A, spec.datum, domain, eps, spec.phi_star);
  for (const auto& s : phi_star.sides())
    if (s.path == "excluded") ++row.excluded_sides;
  const int N = A.components();
  const HomogenizedSolution hom = solve_homogenized(
      cs.A0, N, [&](const BoundaryPoint& p, std::span<double> out) { phi_star(p, out); }, spec.source, domain, row.h,
      spec.solver);
  const FineSolution fine = solve_fine(A, spec.datum, spec.source, eps, domain, row.h, spec.solver);
  row.fine_iterations = fine.stats.iterations;
  const ErrorNorms e0 = error_norms(fine.u, hom.u0.values, domain, spec.margin);
  row.l2 = e0.l2;
  row.h1_interior = e0.h1_interior;
  {
    const std::vector<double> zero(hom.u0.values.size(), 0.0);
    row.u0_norm = error_norms(hom.u0, zero, domain, spec.margin).l2;
  }
  if (spec.order >= 1) {
    const auto tails = corrector_tails(A, cs, domain, eps, phi_star, spec.phi_star);
    const GridFunction ub1 = solve_ubar1(cs, hom.u0, tails, domain, spec.solver);
    const std::vector<double> app = assemble_expansion(hom.u0, ub1.values, cs, eps, 1);
    const ErrorNorms e1 = error_norms(fine.u, app, domain, spec.margin);
    row.l2_order1 = e1.l2;
    row.h1_order1 = e1.h1_interior;
  }
  return row;
}

ConvergenceReport run_sweep(const SweepSpec& spec) {
  if (spec.eps.empty()) throw ConfigError({"ε list is empty"});
  for (std::size_t i = 0; i < spec.eps.size(); ++i) {
    if (!(spec.eps[i] > 0.0 && spec.eps[i] <= 1.0)) throw ConfigError({"ε values must lie in (0, 1]"});
    if (i > 0 && !(spec.eps[i] < spec.eps[i - 1])) throw ConfigError({"ε must be strictly decreasing"});
  }
  ConvergenceReport rep;
  rep.threshold = 1.0 / 11.0;
  rep.A0 = compute_correctors(build_tensor(spec.tensor, spec.cells_per_eps), spec.solver, false).A0;
  rep.rows.resize(spec.eps.size());
  parallel_for(spec.eps.size(), spec.threads, [&](std::size_t i) {
    try {
      rep.rows[i] = sweep_point(spec, spec.eps[i], spec.cells_per_eps);
    } catch (const Error& e) {
      rep.rows[i] = SweepRow{};
      rep.rows[i].eps = spec.eps[i];
      rep.rows[i].h = spec.eps[i] / spec.cells_per_eps;
      rep.rows[i].failure = e.what();
    }
  });
  std::vector<double> eps, l2, h1, h1o;
  double scale = 1.0;
  for (const auto& r : rep.rows) {
    if (!r.failure.empty()) {
      rep.failures.push_back(fmt::format("eps = {}: {}", r.eps, r.failure));
      continue;
    }
    eps.push_back(r.eps);
    l2.push_back(r.l2);
    h1.push_back(r.h1_interior);
    h1o.push_back(r.h1_order1);
    scale = std::max(scale, r.u0_norm);
  }
  rep.l2_monotone = !l2.empty();
  for (std::size_t i = 1; i < l2.size(); ++i)
    if (!(l2[i] < l2[i - 1])) rep.l2_monotone = false;
  rep.below_noise = !l2.empty() && std::all_of(l2.begin(), l2.end(), [&](double e) { return e <= kNoiseFloor * scale; });
  if (rep.below_noise) {
    rep.l2_monotone = false;
    rep.failures.push_back("rate fit rejected: errors are below the solver noise floor");
    return rep;
  }
  auto try_fit = [&](const std::vector<double>& e, const char* what) -> std::optional<RateFit> {
    try {
      return fit_rate(eps, e);
    } catch (const FitError& err) {
      rep.failures.push_back(fmt::format("{} rate: {}", what, err.what()));
      return std::nullopt;
    }
  };
  rep.l2_rate = try_fit(l2, "L2");
  rep.h1_rate = try_fit(h1, "interior H1");
  if (spec.order >= 1) rep.h1_order1_rate = try_fit(h1o, "interior H1 (order 1)");
  return rep;
}

}  // namespace homobl
