#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "homobl/bl.hpp"
#include "homobl/error.hpp"

using namespace homobl;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;

TensorField identity() { return build_tensor(ConstantTensor{{2, 1}, {1, 0, 0, 1}}, 8); }

PointFn cos_y1(double shift = 0.0) {
  return [shift](std::span<const double> y, std::span<double> o) { o[0] = std::cos(kTwoPi * y[0]) + shift; };
}

std::array<double, 2> golden() {
  const double n = std::hypot(1.0, std::numbers::phi);
  return {1.0 / n, std::numbers::phi / n};
}

}  // namespace

TEST(RationalDirection, AxisAndLatticeNormals) {
  const double e2[2] = {0.0, 1.0};
  auto d = rational_direction(e2);
  ASSERT_TRUE(d);
  EXPECT_EQ(d->vec[0], 0);
  EXPECT_EQ(d->vec[1], 1);
  EXPECT_DOUBLE_EQ(d->period, 1.0);

  const double n34[2] = {-0.6, 0.8};
  d = rational_direction(n34);
  ASSERT_TRUE(d);
  EXPECT_EQ(d->vec[0], -3);
  EXPECT_EQ(d->vec[1], 4);
  EXPECT_DOUBLE_EQ(d->period, 5.0);
}

TEST(RationalDirection, IrrationalAndLargeDenominator) {
  const auto g = golden();
  EXPECT_FALSE(rational_direction(g));
  const double big[2] = {1.0 / std::hypot(1.0, 1009.0), 1009.0 / std::hypot(1.0, 1009.0)};
  EXPECT_FALSE(rational_direction(big));
  const double ok[2] = {7.0 / std::hypot(7.0, 997.0), 997.0 / std::hypot(7.0, 997.0)};
  EXPECT_TRUE(rational_direction(ok));
}

TEST(PoissonKernel, CosineHasClosedForm) {
  // harmonic extension of cos(2 pi t) is exp(-2 pi y) cos(2 pi t)
  for (double y : {0.05, 0.25, 0.5, 1.0}) {
    const double v = poisson_kernel_reference([](double s) { return std::cos(kTwoPi * s); }, y);
    EXPECT_NEAR(v, std::exp(-kTwoPi * y), 1e-11);
  }
  EXPECT_NEAR(poisson_kernel_reference([](double) { return 1.0; }, 0.3), 1.0, 1e-12);
  EXPECT_THROW(poisson_kernel_reference([](double) { return 1.0; }, 0.0), DomainError);
}

TEST(StripBL, LaplaceEnergyDecay) {
  const double n[2] = {0.0, 1.0};
  StripOptions so;
  so.resolution = 128;
  so.height = 3.0;
  so.auto_height = false;
  const BLSolution s = solve_strip_rational(rotate_to_strip(identity(), n, cos_y1(0.3), 0.0), 0.0, so);
  EXPECT_EQ(s.path, "rational");
  EXPECT_NEAR(s.U_inf[0], 0.3, 1e-8);
  EXPECT_EQ(s.decay.kind, DecayClass::Exponential);
  EXPECT_NEAR(s.decay.rate, 4.0 * kPi, 0.01 * 4.0 * kPi);
  for (std::size_t k = 0; k < s.t.size(); ++k) {
    if (s.t[k] < 0.1 || s.t[k] > 0.5) continue;
    const double ref = kPi * std::exp(-4.0 * kPi * s.t[k]);
    EXPECT_NEAR(s.F[k] / ref, 1.0, 0.02) << "t = " << s.t[k];
  }
}

TEST(StripBL, LayeredTangentialTailIsWeightedMean) {
  // a = a(z1): d/dz2 int a V dz1 = 0, so U_inf = int a psi / int a = 1/4
  LayeredTensor lt;
  lt.profile = [](double y) { return 2.0 + std::cos(kTwoPi * y); };
  const TensorField A = build_tensor(lt, 32);
  const double n[2] = {0.0, 1.0};
  const BLSolution s = solve_boundary_layer(A, n, cos_y1(), 0.0);
  EXPECT_NEAR(s.U_inf[0], 0.25, 1e-6);
  EXPECT_FALSE(s.truncation_warning);
}

TEST(StripBL, AutoHeightReachesDecayTarget) {
  const double n[2] = {0.0, 1.0};
  StripOptions so;
  so.resolution = 32;
  so.height = 0.2;
  const BLSolution s = solve_strip_rational(rotate_to_strip(identity(), n, cos_y1(), 0.0), 0.0, so);
  EXPECT_GT(s.doublings, 0);
  EXPECT_LE(s.decay_ratio, kDecayTarget);
  EXPECT_FALSE(s.truncation_warning);
}

TEST(StripBL, ShortDomainShowsNoDecay) {
  // F is the tail energy inside the strip, so a layer that has not decayed
  // gives F linear in t and a ratio close to 1/2
  const double n[2] = {0.0, 1.0};
  StripOptions so;
  so.resolution = 32;
  so.height = 0.05;
  so.dz = 0.005;
  so.auto_height = false;
  const BLSolution s = solve_strip_rational(rotate_to_strip(identity(), n, cos_y1(), 0.0), 0.0, so);
  EXPECT_NEAR(s.decay_ratio, 0.5, 0.05);
  EXPECT_GT(s.decay_ratio, 100.0 * kDecayTarget);
}

TEST(StripBL, TruncationWarningMakesTailUnreliable) {
  const double n[2] = {0.0, 1.0};
  BLSolution s = solve_strip_rational(rotate_to_strip(identity(), n, cos_y1(), 0.0), 0.0);
  EXPECT_FALSE(s.truncation_warning);
  EXPECT_NO_THROW(tail_constant(s));
  s.truncation_warning = true;
  EXPECT_THROW(tail_constant(s), UnreliableTailError);
}

TEST(StripBL, ConstantTraceIsFlat) {
  // e1 normal: the trace cos(2 pi y1) is constant along the boundary line
  const double n[2] = {1.0, 0.0};
  const BLSolution s = solve_boundary_layer(identity(), n, cos_y1(), 0.396);
  EXPECT_FALSE(s.truncation_warning);
  EXPECT_NEAR(s.U_inf[0], std::cos(kTwoPi * 0.396), 1e-10);
  EXPECT_EQ(s.decay_ratio, 0.0);
}

TEST(StripBL, RationalOffsetSensitivity) {
  // coefficient depends on the normal coordinate, so the offset shifts the
  // medium seen by the layer
  ScalarTensor st;
  st.coefficient = [](std::span<const double> y) { return 2.0 + std::cos(kTwoPi * y[0]) * std::cos(kTwoPi * y[1]); };
  const TensorField A = build_tensor(st, 32);
  const double n[2] = {0.0, 1.0};
  const BLSolution s0 = solve_boundary_layer(A, n, cos_y1(), 0.0);
  const BLSolution s1 = solve_boundary_layer(A, n, cos_y1(), 0.25);
  const TailReport r = tail_constant(s0, &s1);
  ASSERT_TRUE(r.sensitivity);
  EXPECT_GT(*r.sensitivity, 1e-3);
}

TEST(StripBL, InclinedRationalNormal) {
  // Laplace: any rational normal gives the torus mean of the trace
  const double n[2] = {-0.6, 0.8};
  PointFn phi = [](std::span<const double> y, std::span<double> o) {
    o[0] = 0.5 + std::cos(kTwoPi * (y[0] + y[1]));
  };
  StripOptions so;
  so.resolution = 32;
  const BLSolution s = solve_strip_rational(rotate_to_strip(identity(), n, phi, 0.3), 0.3, so);
  EXPECT_NEAR(s.U_inf[0], 0.5, 1e-8);
}

TEST(StripBL, IrrationalNormalRejectedByStrip) {
  const auto g = golden();
  EXPECT_THROW(rotate_to_strip(identity(), g, cos_y1(), 0.0), ClassificationError);
}

TEST(EnlargedBL, SingleModeOracle) {
  const auto g = golden();
  const int m[2] = {1, -2};
  PointFn phi = [m](std::span<const double> y, std::span<double> o) {
    o[0] = std::cos(kTwoPi * (m[0] * y[0] + m[1] * y[1]));
  };
  const EnlargedProblem p = lift_quasiperiodic(identity(), g, phi, 0.0);
  EnlargedOptions eo;
  eo.modes = 2;
  const BLSolution s = solve_enlarged(p, 0.0, eo);
  const double mu = mode_rate(p.lambda, m);
  // tau . m with tau = (-n2, n1)
  EXPECT_NEAR(mu, kTwoPi * std::abs(-g[1] * m[0] + g[0] * m[1]), 1e-12);
  double err = 0.0;
  for (int j = 0; j < s.rows; ++j)
    for (int q = 0; q < s.row_nodes; ++q) {
      const double th[2] = {double(q % s.grid_modes) / s.grid_modes, double(q / s.grid_modes) / s.grid_modes};
      const double ref = std::cos(kTwoPi * (m[0] * th[0] + m[1] * th[1])) * std::exp(-mu * s.t[j]);
      err = std::max(err, std::abs(s.value(j, q, 0) - ref));
    }
  EXPECT_LT(err, 1e-4);
  EXPECT_NEAR(s.U_inf[0], 0.0, 1e-8);
  EXPECT_EQ(s.path, "quasiperiodic");
}

TEST(EnlargedBL, LaplaceTailIsTorusMeanAndOffsetFree) {
  const auto g = golden();
  PointFn phi = [](std::span<const double> y, std::span<double> o) {
    o[0] = 0.2 + std::cos(kTwoPi * y[0]) * std::sin(kTwoPi * y[1]);
  };
  const TensorField A = identity();
  BLOptions bo;
  bo.enlarged.modes = 3;
  const BLSolution s0 = solve_boundary_layer(A, g, phi, 0.0, bo);
  const BLSolution s1 = solve_boundary_layer(A, g, phi, 0.61, bo);
  const TailReport r = tail_constant(s0, &s1);
  EXPECT_NEAR(r.U_inf[0], 0.2, 1e-8);
  EXPECT_LE(*r.sensitivity, 1e-6);
}

TEST(EnlargedBL, VariableCoefficientOffsetIndependence) {
  const auto g = golden();
  ScalarTensor st;
  st.coefficient = [](std::span<const double> y) { return 2.0 + std::cos(kTwoPi * y[0]) * std::cos(kTwoPi * y[1]); };
  const TensorField A = build_tensor(st, 16);
  BLOptions bo;
  bo.enlarged.modes = 6;
  const BLSolution s0 = solve_boundary_layer(A, g, cos_y1(), 0.0, bo);
  const BLSolution s1 = solve_boundary_layer(A, g, cos_y1(), 0.37, bo);
  EXPECT_LT(std::abs(s0.U_inf[0] - s1.U_inf[0]), 1e-6);
}
