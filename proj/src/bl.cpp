#include "homobl/bl.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <fmt/format.h>
#include <numbers>

#include "homobl/error.hpp"

namespace homobl {

TailReport tail_constant(const BLSolution& sol, const BLSolution* alternative) {
  auto check = [](const BLSolution& s) {
    if (s.truncation_warning) {
      throw UnreliableTailError(fmt::format(
          "boundary layer at offset {} did not decay: F(a+L/2)/F(a) = {:.3g} with L = {}", s.a, s.decay_ratio,
          s.height));
    }
  };
  check(sol);
  TailReport r;
  r.U_inf = sol.U_inf;
  r.decay = sol.decay.kind;
  r.decay_rate = sol.decay.rate;
  if (alternative) {
    check(*alternative);
    if (alternative->U_inf.size() != sol.U_inf.size()) throw ShapeError("tail constants differ in size");
    double s = 0.0;
    for (std::size_t i = 0; i < sol.U_inf.size(); ++i) s = std::max(s, std::abs(sol.U_inf[i] - alternative->U_inf[i]));
    r.sensitivity = s;
  }
  return r;
}

BLSolution solve_boundary_layer(const TensorField& A, std::span<const double> n, const PointFn& phi, double a,
                                const BLOptions& opts) {
  if (n.size() != 2) throw UnsupportedError("boundary layers are implemented for d = 2");
  if (rational_direction(n)) return solve_strip_rational(rotate_to_strip(A, n, phi, a), a, opts.strip);
  return solve_enlarged(lift_quasiperiodic(A, n, phi, a), a, opts.enlarged);
}

double poisson_kernel_reference(const std::function<double(double)>& phi, double y2, double tol) {
  if (!(y2 > 0.0)) throw DomainError("Poisson kernel needs a positive height");
  // sum_k (1/pi) y / (y^2 + (s + k)^2) = (1 - q^2) / (1 - 2 q cos 2 pi s + q^2), q = exp(-2 pi y)
  const double q = std::exp(-2.0 * std::numbers::pi * y2);
  auto f = [&](double s) {
    const double k = (1.0 - q * q) / (1.0 - 2.0 * q * std::cos(2.0 * std::numbers::pi * s) + q * q);
    return k * phi(s);
  };
  using boost::math::quadrature::gauss_kronrod;
  double total = 0.0;
  // the kernel peaks at s = 0 and s = 1; split so each piece has one peak
  for (const auto& [lo, hi] : {std::pair{0.0, 0.5}, std::pair{0.5, 1.0}}) {
    double err = 0.0;
    const double v = gauss_kronrod<double, 31>::integrate(f, lo, hi, 20, tol, &err);
    if (!(err <= std::max(10.0 * tol * std::max(1.0, std::abs(v)), 1e-14)))
      throw Error(fmt::format("Poisson-kernel quadrature did not converge (error estimate {:.3e})", err));
    total += v;
  }
  return total;
}

}  // namespace homobl
