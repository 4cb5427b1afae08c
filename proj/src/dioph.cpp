#include "homobl/dioph.hpp"

#include <boost/math/distributions/binomial.hpp>
#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <numbers>

#include "homobl/error.hpp"
#include "homobl/parallel.hpp"
#include "homobl/rng.hpp"

namespace homobl {

namespace {

// |v.xi| below this multiple of |xi| is an exact zero blurred by rounding
constexpr double kSnap = 1e-13;

struct ScanResult {
  double kappa = std::numeric_limits<double>::infinity();
  std::array<int, 2> arg{};
};

ScanResult scan(double v1, double v2, int truncation, double exponent) {
  ScanResult best;
  // xi and -xi give the same value; keep xi1 > 0, or xi1 == 0 and xi2 > 0
  for (int x1 = 0; x1 <= truncation; ++x1) {
    for (int x2 = -truncation; x2 <= truncation; ++x2) {
      if (x1 == 0 && x2 <= 0) continue;
      const double len = std::hypot(static_cast<double>(x1), static_cast<double>(x2));
      double p = std::abs(v1 * x1 + v2 * x2);
      if (p < kSnap * len) p = 0.0;
      const double k = p * std::pow(len, exponent);
      if (k < best.kappa) {
        best.kappa = k;
        best.arg = {x1, x2};
      }
    }
  }
  return best;
}

void check_normal(std::span<const double> n) {
  if (n.size() != 2) throw UnsupportedError("Diophantine certificates are implemented for d = 2");
  const double len = std::hypot(n[0], n[1]);
  if (std::abs(len - 1.0) > 1e-12) throw DomainError(fmt::format("normal has length {} instead of 1", len));
}

}  // namespace

DiophantineCertificate diophantine_constant(std::span<const double> n, int truncation, double exponent) {
  check_normal(n);
  if (truncation < 1) throw DomainError("truncation must be at least 1");
  if (!(exponent > 0.0)) throw DomainError("exponent must be positive");
  DiophantineCertificate c;
  c.normal = {n[0], n[1]};
  c.exponent = exponent;
  c.truncation = truncation;
  const ScanResult dot = scan(n[0], n[1], truncation, exponent);
  const ScanResult perp = scan(-n[1], n[0], truncation, exponent);
  c.kappa_dot = dot.kappa;
  c.argmin_dot = dot.arg;
  c.kappa_perp = perp.kappa;
  c.argmin_perp = perp.arg;
  return c;
}

bool in_A_kappa(std::span<const double> n, double kappa, int truncation, double exponent) {
  if (!(kappa > 0.0)) throw DomainError("kappa must be positive");
  return diophantine_constant(n, truncation, exponent).kappa_dot >= kappa;
}

std::pair<double, double> clopper_pearson(int failures, int samples, double alpha) {
  using boost::math::binomial_distribution;
  const double lo = failures == 0 ? 0.0
                                  : binomial_distribution<>::find_lower_bound_on_p(samples, failures, alpha / 2);
  const double hi = failures == samples
                        ? 1.0
                        : binomial_distribution<>::find_upper_bound_on_p(samples, failures, alpha / 2);
  return {lo, hi};
}

std::vector<MeasureEstimate> measure_complement(std::span<const double> kappas, int samples, int truncation,
                                                std::uint64_t seed, double exponent, int threads) {
  if (samples < 100) throw DomainError("measure estimates need at least 100 samples");
  for (double k : kappas)
    if (!(k > 0.0)) throw DomainError("kappa must be positive");
  const CounterRng rng(seed);
  std::vector<double> kobs(samples);
  parallel_for(static_cast<std::size_t>(samples), threads, [&](std::size_t s) {
    const double angle = 2.0 * std::numbers::pi * rng.uniform(s);
    kobs[s] = scan(std::cos(angle), std::sin(angle), truncation, exponent).kappa;
  });
  std::vector<MeasureEstimate> out;
  for (double k : kappas) {
    MeasureEstimate m;
    m.kappa = k;
    m.samples = samples;
    for (double v : kobs)
      if (v < k) ++m.failures;
    m.fraction = static_cast<double>(m.failures) / samples;
    std::tie(m.ci_low, m.ci_high) = clopper_pearson(m.failures, samples);
    out.push_back(m);
  }
  return out;
}

MeasureEstimate measure_complement(double kappa, int samples, int truncation, std::uint64_t seed,
                                   double exponent, int threads) {
  const double k[1] = {kappa};
  return measure_complement(std::span<const double>(k, 1), samples, truncation, seed, exponent, threads).front();
}

}  // namespace homobl
