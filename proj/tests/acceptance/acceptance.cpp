// Acceptance checks. One line per criterion; exit status 1 if any fails.

#include <fmt/core.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>

#include "homobl/bl.hpp"
#include "homobl/cell.hpp"
#include "homobl/config.hpp"
#include "homobl/dioph.hpp"
#include "homobl/fit.hpp"
#include "homobl/homog.hpp"
#include "homobl/run.hpp"
#include "homobl/stencil.hpp"

using namespace homobl;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;
const fs::path kConfigs = HOMOBL_CONFIG_DIR;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double max_abs_diff(std::span<const double> u, std::span<const double> v) {
  double m = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) m = std::max(m, std::abs(u[k] - v[k]));
  return m;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TensorField identity(int M) { return build_tensor(ConstantTensor{{2, 1}, {1, 0, 0, 1}}, M); }

ScalarTensor checkerboard() {
  ScalarTensor s;
  s.coefficient = [](std::span<const double> y) {
    return 2.0 + std::cos(kTwoPi * y[0]) * std::cos(kTwoPi * y[1]);
  };
  return s;
}

PointFn cos_y1() {
  return [](std::span<const double> y, std::span<double> o) { o[0] = std::cos(kTwoPi * y[0]); };
}

std::array<double, 2> golden() {
  const double n = std::hypot(1.0, std::numbers::phi);
  return {1.0 / n, std::numbers::phi / n};
}

SolveOptions tight() {
  SolveOptions o;
  o.rtol = 1e-12;
  return o;
}

Outcome criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  LayeredTensor lt;
  lt.profile = [](double y) { return 2.0 + std::cos(kTwoPi * y); };
  const CorrectorSet cs = compute_correctors(build_tensor(lt, 256), {}, false);
  const double dt = seconds_since(t0);
  const double err = std::max({std::abs(cs.A0[0] - std::sqrt(3.0)), std::abs(cs.A0[3] - 2.0), std::abs(cs.A0[1]),
                               std::abs(cs.A0[2])});
  return {err <= 1e-6 && dt < 10.0, fmt::format("max |A0 - diag(sqrt3, 2)| = {:.3e}, {:.2f} s", err, dt)};
}

Outcome criterion2() {
  SolveOptions o;
  o.rtol = 1e-10;
  const CorrectorSet cs = compute_correctors(identity(32), o, true);
  double chi = 0.0, ups = 0.0;
  for (const auto& f : cs.chi) chi = std::max(chi, max_abs(f.data()));
  for (const auto& f : cs.upsilon) ups = std::max(ups, max_abs(f.data()));
  const double a0 = std::max({std::abs(cs.A0[0] - 1.0), std::abs(cs.A0[3] - 1.0), std::abs(cs.A0[1]), std::abs(cs.A0[2])});
  const double c = max_abs(cs.c);
  const double worst = std::max({chi, ups, a0, c});
  return {worst <= 1e-10, fmt::format("|chi| = {:.1e}, |Ups| = {:.1e}, |A0 - I| = {:.1e}, |c| = {:.1e}", chi, ups, a0, c)};
}

Outcome criterion3() {
  const double n[2] = {0.0, 1.0};
  StripOptions so;
  so.resolution = 128;
  so.height = 3.0;
  so.auto_height = false;
  so.solver = tight();
  const BLSolution s = solve_strip_rational(rotate_to_strip(identity(8), n, cos_y1(), 0.0), 0.0, so);
  double worst = 0.0;
  std::vector<double> t, logF;
  for (std::size_t k = 0; k < s.t.size(); ++k) {
    if (s.t[k] < 0.1 - 1e-12 || s.t[k] > 0.5 + 1e-12) continue;
    const double ref = kPi * std::exp(-4.0 * kPi * s.t[k]);
    worst = std::max(worst, std::abs(s.F[k] / ref - 1.0));
    t.push_back(s.t[k]);
    logF.push_back(std::log(s.F[k]));
  }
  const LinearFit f = linear_fit(t, logF);
  return {worst <= 0.02 && f.r2 >= 0.999,
          fmt::format("max rel. error {:.4f} on [0.1, 0.5], log-F slope {:.4f} (4 pi = {:.4f}), R^2 = {:.6f}", worst,
                      -f.slope, 4.0 * kPi, f.r2)};
}

Outcome criterion4() {
  const double n[2] = {0.0, 1.0};
  StripOptions so;
  so.resolution = 256;
  so.height = 2.0;
  so.auto_height = false;
  so.solver = tight();
  const BLSolution s = solve_strip_rational(rotate_to_strip(identity(8), n, cos_y1(), 0.0), 0.0, so);
  double worst = 0.0;
  int found = 0;
  for (double y2 : {0.25, 0.5, 1.0}) {
    for (int j = 0; j < s.rows; ++j) {
      if (std::abs(s.t[j] - y2) > 1e-9) continue;
      ++found;
      const double ref = poisson_kernel_reference([](double x) { return std::cos(kTwoPi * x); }, y2);
      worst = std::max(worst, std::abs(s.value(j, 0, 0) - ref));
    }
  }
  const double tail = std::abs(s.U_inf[0]);
  return {found == 3 && worst <= 1e-4 && tail <= 1e-6,
          fmt::format("max |U - Poisson| = {:.2e} at y2 in {{0.25, 0.5, 1}}, |U_inf| = {:.1e}", worst, tail)};
}

Outcome criterion5() {
  const auto g = golden();
  const std::vector<std::array<int, 2>> modes = {{1, 0}, {0, 1}, {1, -1}, {1, -2}, {2, 1}, {3, -2}, {-1, 3}, {3, 3}};
  double worst = 0.0, worst_rate = 0.0;
  for (const auto& m : modes) {
    PointFn phi = [m](std::span<const double> y, std::span<double> o) {
      o[0] = std::cos(kTwoPi * (m[0] * y[0] + m[1] * y[1]));
    };
    const EnlargedProblem p = lift_quasiperiodic(identity(8), g, phi, 0.0);
    EnlargedOptions eo;
    eo.modes = 3;
    eo.solver = tight();
    const BLSolution s = solve_enlarged(p, 0.0, eo);
    const double mu = mode_rate(p.lambda, m);
    const int Mg = s.grid_modes;
    std::vector<double> t, logamp;
    for (int j = 0; j < s.rows; ++j) {
      double proj = 0.0, norm = 0.0;
      for (int q = 0; q < s.row_nodes; ++q) {
        const double th[2] = {double(q % Mg) / Mg, double(q / Mg) / Mg};
        const double c = std::cos(kTwoPi * (m[0] * th[0] + m[1] * th[1]));
        const double ref = c * std::exp(-mu * s.t[j]);
        worst = std::max(worst, std::abs(s.value(j, q, 0) - ref));
        proj += s.value(j, q, 0) * c;
        norm += c * c;
      }
      const double amp = proj / norm;
      if (amp > 1e-6) {
        t.push_back(s.t[j]);
        logamp.push_back(std::log(amp));
      }
    }
    const double rate = -linear_fit(t, logamp).slope;
    worst_rate = std::max(worst_rate, std::abs(rate / mu - 1.0));
  }
  return {worst <= 1e-4 && worst_rate <= 0.01,
          fmt::format("{} modes, max |V - cos(m.theta) e^(-mu t)| = {:.2e}, max rate error {:.3f}%", modes.size(),
                      worst, 100.0 * worst_rate)};
}

Outcome criterion6() {
  const auto g = golden();
  PointFn phi = [](std::span<const double> y, std::span<double> o) {
    o[0] = 0.2 + std::cos(kTwoPi * y[0]) * std::sin(kTwoPi * y[1]) + 0.3 * std::cos(kTwoPi * (y[0] - 2 * y[1]));
  };
  BLOptions bo;
  bo.enlarged.modes = 3;
  const BLSolution s0 = solve_boundary_layer(identity(8), g, phi, 0.0, bo);
  double dio = 0.0;
  for (double a : {0.37, 1.61, 5.05}) {
    const BLSolution s1 = solve_boundary_layer(identity(8), g, phi, a, bo);
    dio = std::max(dio, *tail_constant(s0, &s1).sensitivity);
  }
  const auto cfg = parse_config(kConfigs / "rational_offset_bl.json");
  const RunManifest m = run("bl", cfg, {fs::temp_directory_path() / "homobl_acceptance" / "rational_offset"});
  double rat = -1.0;
  if (m.summary.contains("offset_sensitivity")) rat = m.summary["offset_sensitivity"].get<double>();
  return {m.ok() && dio <= 1e-6 && rat > 1e-3,
          fmt::format("golden Laplace sensitivity {:.1e}, rational checkerboard sensitivity {:.3e}", dio, rat)};
}

Outcome criterion7() {
  const auto t0 = std::chrono::steady_clock::now();
  bool rational_zero = true;
  for (auto v : std::vector<std::array<double, 2>>{{0, 1}, {1, 0}, {1, 1}, {3, -4}, {2, 7}, {5, 12}}) {
    const double r = std::hypot(v[0], v[1]);
    const std::array<double, 2> n = {v[0] / r, v[1] / r};
    rational_zero = rational_zero && diophantine_constant(n, 50).kappa_dot < 1e-12;
  }
  const double kg = diophantine_constant(golden(), 50).kappa_dot;
  const std::vector<double> kappas = {0.02, 0.04, 0.08};
  const auto est = measure_complement(kappas, 1000, 50, 2024);
  std::vector<double> frac;
  for (const auto& e : est) frac.push_back(e.fraction);
  const LinearFit f = origin_fit(kappas, frac);
  const double dt = seconds_since(t0);
  return {rational_zero && kg > 0.0 && f.r2 >= 0.9 && dt < 60.0,
          fmt::format("rational kappa = 0: {}, golden kappa = {:.4f}, fractions {:.3f} {:.3f} {:.3f}, "
                      "origin-fit R^2 = {:.4f}, {:.1f} s",
                      rational_zero ? "yes" : "no", kg, frac[0], frac[1], frac[2], f.r2, dt)};
}

// criteria 8 and 9 share one sweep
struct SweepOutcome {
  Outcome c8, c9;
};

SweepOutcome criteria8and9() {
  const auto cfg = parse_config(kConfigs / "layered_sweep.json");
  SweepSpec spec = sweep_spec(cfg);
  spec.eps = {1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64};
  spec.cells_per_eps = 8;
  spec.order = 1;
  spec.margin = 0.2;
  const auto t0 = std::chrono::steady_clock::now();
  const ConvergenceReport r = run_sweep(spec);
  const double dt = seconds_since(t0);
  SweepOutcome o;
  std::string errs;
  for (const auto& row : r.rows) errs += fmt::format(" {:.3e}", row.l2);
  const double a8 = r.l2_rate ? r.l2_rate->rate : std::nan("");
  o.c8 = {r.failures.empty() && r.l2_monotone && r.l2_rate && a8 >= 1.0 / 11.0 && dt < 600.0,
          fmt::format("L2 errors{}, rate {:.3f} (threshold {:.4f}), {:.0f} s", errs, a8, 1.0 / 11.0, dt)};
  std::string h1;
  for (const auto& row : r.rows) h1 += fmt::format(" {:.3e}", row.h1_order1);
  const double a9 = r.h1_order1_rate ? r.h1_order1_rate->rate : std::nan("");
  o.c9 = {r.h1_order1_rate && a9 >= 0.8 && a9 <= 1.2, fmt::format("interior H1 errors{}, rate {:.3f}", h1, a9)};
  return o;
}

Outcome criterion10() {
  std::vector<std::string> bad;
  const TensorField A = build_tensor(checkerboard(), 16);
  const Domain d(DomainSpec{});
  BoundaryChart chart{{-1e-9, -1e-9}, {1 + 1e-9, 1 + 1e-9}};
  auto datum = [&](double a, double b) {
    return DirichletDatum(2, 1, chart, [a, b](std::span<const double> x, std::span<double> o) {
      o[0] = a * std::cos(kTwoPi * x[0]) + b * x[1] * x[1];
    });
  };

  // linearity: fine solve
  {
    const auto u1 = solve_fine(A, datum(1, 0), {}, 0.25, d, 1.0 / 32, tight());
    const auto u2 = solve_fine(A, datum(0, 1), {}, 0.25, d, 1.0 / 32, tight());
    const auto u12 = solve_fine(A, datum(0.7, -1.3), {}, 0.25, d, 1.0 / 32, tight());
    std::vector<double> c(u1.u.values.size());
    for (std::size_t k = 0; k < c.size(); ++k) c[k] = 0.7 * u1.u.values[k] - 1.3 * u2.u.values[k];
    if (max_abs_diff(c, u12.u.values) > 1e-8) bad.push_back("fine linearity");
  }
  // linearity: homogenized solve
  {
    const double A0[4] = {1.7, 0.2, 0.2, 2.1};
    auto g = [](double a) {
      return BoundaryFn([a](const BoundaryPoint& p, std::span<double> o) { o[0] = a * std::cos(kTwoPi * p.x[0]); });
    };
    PointFn f = [](std::span<const double> x, std::span<double> o) { o[0] = x[1]; };
    const auto u1 = solve_homogenized(A0, 1, g(1), {}, d, 1.0 / 32, tight());
    const auto u2 = solve_homogenized(A0, 1, g(0), f, d, 1.0 / 32, tight());
    const auto u12 = solve_homogenized(A0, 1, g(2), f, d, 1.0 / 32, tight());
    std::vector<double> c(u1.u0.values.size());
    for (std::size_t k = 0; k < c.size(); ++k) c[k] = 2.0 * u1.u0.values[k] + u2.u0.values[k];
    if (max_abs_diff(c, u12.u0.values) > 1e-8) bad.push_back("homogenized linearity");
  }
  // linearity: boundary layer
  {
    const double n[2] = {0.0, 1.0};
    PointFn p2 = [](std::span<const double> y, std::span<double> o) { o[0] = std::sin(kTwoPi * (y[0] + y[1])); };
    PointFn p12 = [](std::span<const double> y, std::span<double> o) {
      o[0] = 3.0 * std::cos(kTwoPi * y[0]) + 0.5 * std::sin(kTwoPi * (y[0] + y[1]));
    };
    BLOptions bo;
    bo.strip.auto_height = false;
    bo.strip.solver = tight();
    const auto s1 = solve_boundary_layer(A, n, cos_y1(), 0.1, bo);
    const auto s2 = solve_boundary_layer(A, n, p2, 0.1, bo);
    const auto s12 = solve_boundary_layer(A, n, p12, 0.1, bo);
    std::vector<double> c(s1.V.size());
    for (std::size_t k = 0; k < c.size(); ++k) c[k] = 3.0 * s1.V[k] + 0.5 * s2.V[k];
    if (c.size() != s12.V.size() || max_abs_diff(c, s12.V) > 1e-8) bad.push_back("boundary-layer linearity");
  }
  // linearity: cell problem in the direction e
  {
    const CorrectorSet cs = compute_correctors(A, tight(), false);
    DivergenceOperator op(StencilGrid::torus(16), 1, A.values().data());
    const double slope[2] = {1.0, 1.0};
    std::vector<double> zero(A.grid().size(), 0.0), rhs(A.grid().size());
    op.apply(zero, rhs, slope);
    for (double& v : rhs) v = -v;
    const FieldSolve s = solve_periodic(op, rhs, tight());
    std::vector<double> c(rhs.size());
    for (std::size_t k = 0; k < c.size(); ++k) c[k] = cs.chi[0].data()[k] + cs.chi[1].data()[k];
    if (max_abs_diff(c, s.u) > 1e-8) bad.push_back("cell linearity");
  }
  // maximum principle
  {
    const auto u = solve_fine(A, datum(1, 0.5), {}, 0.25, d, 1.0 / 32, tight());
    double lo = 1e300, hi = -1e300;
    for (std::size_t p = 0; p < u.u.grid.size(); ++p)
      if (u.u.grid.kind[p] == NodeKind::Dirichlet) {
        lo = std::min(lo, u.u.values[p]);
        hi = std::max(hi, u.u.values[p]);
      }
    for (double v : u.u.values)
      if (v < lo - 1e-10 || v > hi + 1e-10) {
        bad.push_back("maximum principle");
        break;
      }
  }
  // zero means
  {
    const CorrectorSet cs = compute_correctors(A, {}, true);
    double worst = 0.0;
    for (const auto& f : cs.chi) worst = std::max(worst, std::abs(f.mean(0)));
    for (const auto& f : cs.upsilon) worst = std::max(worst, std::abs(f.mean(0)));
    if (worst > 1e-12) bad.push_back(fmt::format("zero mean ({:.1e})", worst));
  }
  // determinism of artifacts
  {
    const fs::path base = fs::temp_directory_path() / "homobl_acceptance";
    const auto dio = parse_config(kConfigs / "golden_dioph.json");
    const auto cell = parse_config(kConfigs / "layered.json");
    for (const char* tag : {"a", "b"}) {
      run("dioph", dio, {base / tag, true});
      run("cell", cell, {base / tag});
    }
    for (const char* f : {"measure.csv", "certificate.json", "correctors.json", "chi.csv", "upsilon.csv"})
      if (slurp(base / "a" / f) != slurp(base / "b" / f) || slurp(base / "a" / f).empty())
        bad.push_back(fmt::format("determinism of {}", f));
  }
  std::string detail = "linearity, maximum principle, zero means, determinism";
  if (!bad.empty()) {
    detail = "failed:";
    for (const auto& b : bad) detail += " " + b + ";";
  }
  return {bad.empty(), detail};
}

}  // namespace

int main() {
  int failed = 0;
  auto report = [&](int id, const char* name, const std::function<Outcome()>& f) {
    Outcome o;
    try {
      o = f();
    } catch (const std::exception& e) {
      o = {false, fmt::format("threw: {}", e.what())};
    }
    if (!o.pass) ++failed;
    fmt::print("[{}] {:2d} {}: {}\n", o.pass ? "PASS" : "FAIL", id, name, o.detail);
    std::fflush(stdout);
  };
  report(1, "homogenized tensor oracle", criterion1);
  report(2, "constant-coefficient degeneracy", criterion2);
  report(3, "exponential energy decay", criterion3);
  report(4, "Poisson-kernel oracle", criterion4);
  report(5, "enlarged single-mode oracle", criterion5);
  report(6, "offset independence and dependence", criterion6);
  report(7, "Diophantine certificates", criterion7);
  SweepOutcome sw;
  bool sweep_ok = true;
  std::string sweep_err;
  try {
    sw = criteria8and9();
  } catch (const std::exception& e) {
    sweep_ok = false;
    sweep_err = e.what();
  }
  report(8, "convergence sweep", [&] { return sweep_ok ? sw.c8 : Outcome{false, "threw: " + sweep_err}; });
  report(9, "interior ansatz order", [&] { return sweep_ok ? sw.c9 : Outcome{false, "threw: " + sweep_err}; });
  report(10, "property suites", criterion10);
  fmt::print("{} of 10 criteria passed\n", 10 - failed);
  return failed == 0 ? 0 : 1;
}
