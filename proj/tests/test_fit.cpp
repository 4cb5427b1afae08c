#include <gtest/gtest.h>

#include <cmath>

#include "homobl/error.hpp"
#include "homobl/fit.hpp"

using namespace homobl;

TEST(Fit, LinearExact) {
  const std::vector<double> x = {0, 1, 2, 3}, y = {1, 3, 5, 7};
  const LinearFit f = linear_fit(x, y);
  EXPECT_NEAR(f.slope, 2.0, 1e-14);
  EXPECT_NEAR(f.intercept, 1.0, 1e-14);
  EXPECT_NEAR(f.r2, 1.0, 1e-14);
  EXPECT_EQ(f.points, 4);
}

TEST(Fit, OriginFitPenalizesOffset) {
  const std::vector<double> x = {1, 2, 3};
  EXPECT_NEAR(origin_fit(x, std::vector<double>{2, 4, 6}).r2, 1.0, 1e-14);
  EXPECT_LT(origin_fit(x, std::vector<double>{5, 6, 7}).r2, 0.5);
}

TEST(Fit, RateOfPowerLaw) {
  const std::vector<double> eps = {1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64};
  std::vector<double> e;
  for (double x : eps) e.push_back(3.0 * std::sqrt(x));
  const RateFit r = fit_rate(eps, e);
  EXPECT_NEAR(r.rate, 0.5, 1e-12);
  EXPECT_NEAR(r.constant, 3.0, 1e-12);
}

TEST(Fit, RateRejectsBadInput) {
  const std::vector<double> eps = {1.0 / 8, 1.0 / 16, 1.0 / 32};
  EXPECT_THROW(fit_rate(std::vector<double>{0.1, 0.2}, std::vector<double>{1, 1}), FitError);
  EXPECT_THROW(fit_rate(std::vector<double>{0.1, 0.2, 0.05}, std::vector<double>{1, 1, 1}), FitError);
  EXPECT_THROW(fit_rate(eps, std::vector<double>{1, 0, 1}), FitError);
}

TEST(Fit, DecayClassification) {
  std::vector<double> t, fe, fp, fz;
  for (int k = 0; k <= 200; ++k) {
    const double s = 0.05 * k;
    t.push_back(s);
    fe.push_back(std::exp(-3.0 * s));
    fp.push_back(std::pow(1.0 + s, -2.0));
    fz.push_back(1.0);
  }
  const DecayFit e = classify_decay(t, fe, 0.0, 1e-12);
  EXPECT_EQ(e.kind, DecayClass::Exponential);
  EXPECT_NEAR(e.rate, 3.0, 1e-9);
  const DecayFit p = classify_decay(t, fp, 0.0, 1e-12);
  EXPECT_EQ(p.kind, DecayClass::Polynomial);
  EXPECT_NEAR(p.rate, 2.0, 1e-9);
  EXPECT_EQ(classify_decay(t, fz, 0.0, 1e-12).kind, DecayClass::None);
  EXPECT_EQ(to_string(DecayClass::Exponential), "exponential");
}
