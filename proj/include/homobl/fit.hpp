#pragma once

#include <span>
#include <string>

namespace homobl {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;        ///< coefficient of determination
  double residual = 0.0;  ///< root-mean-square residual
  int points = 0;
};

/// Ordinary least squares y = slope * x + intercept. Needs two distinct x.
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

/// Least squares through the origin, y = slope * x. r2 is the centred
/// coefficient of determination, so a line through the origin has to explain
/// the spread of y around its mean.
LinearFit origin_fit(std::span<const double> x, std::span<const double> y);

struct RateFit {
  double rate = 0.0;      ///< slope of log e against log eps
  double constant = 0.0;  ///< exp(intercept)
  double residual = 0.0;
  double r2 = 0.0;
};

/// Power law e ~ C eps^rate. Needs at least 3 points, eps strictly decreasing
/// and every e positive; otherwise throws FitError.
RateFit fit_rate(std::span<const double> eps, std::span<const double> errors);

enum class DecayClass { Exponential, Polynomial, None };

std::string to_string(DecayClass c);

struct DecayFit {
  DecayClass kind = DecayClass::None;
  LinearFit exponential;  ///< log F against t
  LinearFit power;        ///< log F against log(t - t0 + shift)
  double rate = 0.0;      ///< -slope of the selected fit
};

inline constexpr double kExponentialR2 = 0.99;
inline constexpr double kPolynomialR2 = 0.95;

/// Classifies samples of a nonnegative decreasing energy. Samples with
/// F <= floor are dropped. The power fit uses log(t - t0 + 1) so that the
/// first sample is finite.
DecayFit classify_decay(std::span<const double> t, std::span<const double> F, double t0, double floor);

}  // namespace homobl
