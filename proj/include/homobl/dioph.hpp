#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace homobl {

/// Truncated small-divisor constants of a unit normal in d = 2.
///
/// kappa_dot = min |n.xi| |xi|^l and kappa_perp = min |n_perp.xi| |xi|^l over
/// integer xi with 0 < |xi|_inf <= truncation. In d = 2 the two agree, since a
/// quarter turn maps Z^2 onto itself; both are reported.
struct DiophantineCertificate {
  std::array<double, 2> normal{};
  double exponent = 2.0;
  int truncation = 0;
  double kappa_dot = 0.0;
  std::array<int, 2> argmin_dot{};
  double kappa_perp = 0.0;
  std::array<int, 2> argmin_perp{};
};

inline constexpr int kDefaultTruncation = 1000;

DiophantineCertificate diophantine_constant(std::span<const double> n, int truncation = kDefaultTruncation,
                                            double exponent = 2.0);

/// True iff kappa_dot >= kappa (membership up to frequency `truncation`).
bool in_A_kappa(std::span<const double> n, double kappa, int truncation = kDefaultTruncation,
                double exponent = 2.0);

struct MeasureEstimate {
  double kappa = 0.0;
  int samples = 0;
  int failures = 0;
  double fraction = 0.0;
  double ci_low = 0.0;  ///< Clopper-Pearson 95%
  double ci_high = 0.0;
};

/// Fraction of uniformly drawn unit normals (angle 2 pi u_k, u_k from
/// CounterRng(seed)) outside A_kappa. Needs samples >= 100.
MeasureEstimate measure_complement(double kappa, int samples, int truncation, std::uint64_t seed,
                                   double exponent = 2.0, int threads = 1);

/// The same estimate for several kappa on one common sample set, so the
/// fractions are exactly monotone in kappa.
std::vector<MeasureEstimate> measure_complement(std::span<const double> kappas, int samples, int truncation,
                                                std::uint64_t seed, double exponent = 2.0, int threads = 1);

/// Clopper-Pearson interval for `failures` out of `samples` at level 1 - alpha.
std::pair<double, double> clopper_pearson(int failures, int samples, double alpha = 0.05);

}  // namespace homobl
