#include "homobl/fit.hpp"

#include <cmath>
#include <vector>

#include "homobl/error.hpp"

namespace homobl {

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw FitError("fit: x and y differ in length");
  const std::size_t n = x.size();
  if (n < 2) throw FitError("fit: need at least two points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0.0) throw FitError("fit: all x values coincide");
  LinearFit f;
  f.points = static_cast<int>(n);
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (f.slope * x[i] + f.intercept);
    ss += r * r;
  }
  f.residual = std::sqrt(ss / n);
  f.r2 = syy > 0.0 ? 1.0 - ss / syy : 1.0;
  return f;
}

LinearFit origin_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw FitError("fit: x and y differ in length");
  const std::size_t n = x.size();
  if (n < 1) throw FitError("fit: no points");
  double sxx = 0.0, sxy = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
    my += y[i];
  }
  if (sxx <= 0.0) throw FitError("fit: all x values are zero");
  my /= n;
  LinearFit f;
  f.points = static_cast<int>(n);
  f.slope = sxy / sxx;
  double ss = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - f.slope * x[i];
    ss += r * r;
    syy += (y[i] - my) * (y[i] - my);
  }
  f.residual = std::sqrt(ss / n);
  f.r2 = syy > 0.0 ? 1.0 - ss / syy : (ss == 0.0 ? 1.0 : 0.0);
  return f;
}

RateFit fit_rate(std::span<const double> eps, std::span<const double> errors) {
  if (eps.size() != errors.size()) throw FitError("rate fit: eps and errors differ in length");
  if (eps.size() < 3) throw FitError("rate fit: need at least 3 points");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] > 0.0)) throw FitError("rate fit: eps must be positive");
    if (i > 0 && !(eps[i] < eps[i - 1])) throw FitError("rate fit: eps must be strictly decreasing");
    if (!(errors[i] > 0.0)) throw FitError("rate fit: errors must be positive");
    lx.push_back(std::log(eps[i]));
    ly.push_back(std::log(errors[i]));
  }
  const LinearFit f = linear_fit(lx, ly);
  return {f.slope, std::exp(f.intercept), f.residual, f.r2};
}

std::string to_string(DecayClass c) {
  switch (c) {
    case DecayClass::Exponential: return "exponential";
    case DecayClass::Polynomial: return "polynomial";
    case DecayClass::None: break;
  }
  return "none";
}

DecayFit classify_decay(std::span<const double> t, std::span<const double> F, double t0, double floor) {
  std::vector<double> x, lx, ly;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!(F[i] > floor)) continue;
    x.push_back(t[i]);
    lx.push_back(std::log(t[i] - t0 + 1.0));
    ly.push_back(std::log(F[i]));
  }
  DecayFit d;
  if (x.size() < 3) return d;
  d.exponential = linear_fit(x, ly);
  d.power = linear_fit(lx, ly);
  if (d.exponential.slope < 0.0 && d.exponential.r2 >= kExponentialR2) {
    d.kind = DecayClass::Exponential;
    d.rate = -d.exponential.slope;
  } else if (d.power.slope < 0.0 && d.power.r2 >= kPolynomialR2) {
    d.kind = DecayClass::Polynomial;
    d.rate = -d.power.slope;
  }
  return d;
}

}  // namespace homobl
