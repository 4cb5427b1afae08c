#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "homobl/cell.hpp"
#include "homobl/error.hpp"

using namespace homobl;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double layer(double y) { return 2.0 + std::cos(kTwoPi * y); }

LayeredTensor layered() {
  LayeredTensor t;
  t.profile = layer;
  t.axis = 0;
  return t;
}

// periodic trapezoid rule, spectrally accurate for smooth integrands
template <class F>
double periodic_mean(F f, int n = 4096) {
  double s = 0.0;
  for (int k = 0; k < n; ++k) s += f((k + 0.5) / n);
  return s / n;
}

ScalarTensor checkerboard(bool inverse) {
  ScalarTensor s;
  s.coefficient = [inverse](std::span<const double> y) {
    const double a = 2.0 + std::cos(kTwoPi * y[0]) * std::cos(kTwoPi * y[1]);
    return inverse ? 1.0 / a : a;
  };
  return s;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

TEST(Cell, LayeredMatchesHarmonicAndArithmeticMeans) {
  const double harmonic = 1.0 / periodic_mean([](double y) { return 1.0 / layer(y); });
  const double arithmetic = periodic_mean(layer);
  const CorrectorSet cs = compute_correctors(build_tensor(layered(), 128), SolveOptions{}, false);
  EXPECT_NEAR(cs.A0[0], harmonic, 2e-5);
  EXPECT_NEAR(cs.A0[3], arithmetic, 1e-12);
  EXPECT_NEAR(cs.A0[1], 0.0, 1e-12);
  EXPECT_NEAR(cs.A0[2], 0.0, 1e-12);
}

TEST(Cell, LayeredHarmonicMeanIsSpectrallyAccurate) {
  // harmonic face averages turn the discrete 1/A0 into the periodic trapezoid
  // rule for mean(1/a), which converges faster than any power of 1/M
  const double harmonic = 1.0 / periodic_mean([](double y) { return 1.0 / layer(y); });
  const double e16 = std::abs(compute_correctors(build_tensor(layered(), 16), {}, false).A0[0] - harmonic);
  const double e32 = std::abs(compute_correctors(build_tensor(layered(), 32), {}, false).A0[0] - harmonic);
  EXPECT_LT(e16, 1e-8);
  EXPECT_LT(e32, 1e-12);
}

TEST(Cell, LayeredCorrectorProfile) {
  // chi'(y) = c / a(y) - 1 with c the harmonic mean; chi has zero mean
  const double c = 1.0 / periodic_mean([](double y) { return 1.0 / layer(y); });
  const int M = 128;
  const CorrectorSet cs = compute_correctors(build_tensor(layered(), M), {}, false);
  const int n = 8192;
  std::vector<double> prim(n + 1, 0.0);
  for (int k = 0; k < n; ++k) {
    const double y0 = double(k) / n, y1 = double(k + 1) / n, ym = 0.5 * (y0 + y1);
    const auto g = [c](double y) { return c / layer(y) - 1.0; };
    prim[k + 1] = prim[k] + (g(y0) + 4 * g(ym) + g(y1)) / (6.0 * n);
  }
  double mean = 0.0;
  for (int k = 0; k < n; ++k) mean += 0.5 * (prim[k] + prim[k + 1]) / n;
  double err = 0.0;
  for (std::size_t p = 0; p < cs.chi[0].grid().size(); ++p) {
    double y[2];
    cs.chi[0].grid().coordinates(p, y);
    const double ref = prim[static_cast<int>(std::lround(y[0] * n))] - mean;
    err = std::max(err, std::abs(cs.chi[0].at(p)[0] - ref));
    EXPECT_NEAR(cs.chi[1].at(p)[0], 0.0, 1e-12);
  }
  EXPECT_LT(err, 1e-4);
}

TEST(Cell, ConstantIdentityDegenerates) {
  const CorrectorSet cs = compute_correctors(build_tensor(ConstantTensor{{2, 1}, {1, 0, 0, 1}}, 16), {}, true);
  for (const auto& f : cs.chi) EXPECT_EQ(max_abs(f.data()), 0.0);
  for (const auto& f : cs.upsilon) EXPECT_EQ(max_abs(f.data()), 0.0);
  EXPECT_EQ(max_abs(cs.c), 0.0);
  EXPECT_NEAR(cs.A0[0], 1.0, 1e-14);
  EXPECT_NEAR(cs.A0[3], 1.0, 1e-14);
  EXPECT_NEAR(cs.A0[1], 0.0, 1e-14);
}

TEST(Cell, KellerDualityForSymmetricCheckerboard) {
  // mu(a) mu(1/a) = 1 in 2D when A0 is isotropic
  const CorrectorSet a = compute_correctors(build_tensor(checkerboard(false), 64), {}, false);
  const CorrectorSet b = compute_correctors(build_tensor(checkerboard(true), 64), {}, false);
  EXPECT_NEAR(a.A0[0], a.A0[3], 1e-10);
  EXPECT_NEAR(a.A0[1], 0.0, 1e-10);
  EXPECT_NEAR(a.A0[0] * b.A0[0], 1.0, 2e-3);
}

TEST(Cell, VoigtReussBounds) {
  const auto spec = checkerboard(false);
  const CorrectorSet cs = compute_correctors(build_tensor(spec, 32), {}, false);
  double mean_a = 0.0, mean_inv = 0.0;
  const int n = 256;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double y[2] = {(i + 0.5) / n, (j + 0.5) / n};
      const double a = spec.coefficient(y);
      mean_a += a / (n * n);
      mean_inv += 1.0 / a / (n * n);
    }
  EXPECT_GT(cs.A0[0], 1.0 / mean_inv);
  EXPECT_LT(cs.A0[0], mean_a);
}

TEST(Cell, SystemWithScalarBlocksMatchesScalarProblem) {
  // A^{ab}_{ij} = delta_ab delta_ij a(y) for N = 2
  auto a = [](std::span<const double> y) { return 2.0 + std::cos(kTwoPi * y[0]) * std::cos(kTwoPi * y[1]); };
  auto zero = [](std::span<const double>) { return 0.0; };
  TrigonometricTensor t;
  t.shape = {2, 2};
  for (int ab = 0; ab < 4; ++ab)
    for (int ij = 0; ij < 4; ++ij) {
      const bool diag = (ab == 0 || ab == 3) && (ij == 0 || ij == 3);
      t.entries.push_back(TrigPolynomial::fit(diag ? std::function<double(std::span<const double>)>(a) : zero, 2));
    }
  // systems use arithmetic face averages, scalars harmonic ones: the two
  // discretizations differ at O(h^2) and share the limit
  const TensorShape sh{2, 2};
  double prev = 0.0;
  for (int M : {16, 32, 64}) {
    const CorrectorSet sys = compute_correctors(build_tensor(t, M), {}, false);
    const CorrectorSet sca = compute_correctors(build_tensor(checkerboard(false), M), {}, false);
    const double diff = std::abs(sys.A0[sh.index(0, 0, 0, 0)] - sca.A0[0]);
    for (int i = 0; i < 2; ++i) {
      EXPECT_NEAR(sys.A0[sh.index(0, 0, i, i)], sys.A0[sh.index(0, 0, 0, 0)], 1e-12);
      EXPECT_NEAR(sys.A0[sh.index(1, 1, i, i)], sys.A0[sh.index(0, 0, 0, 0)], 1e-10);
    }
    EXPECT_NEAR(sys.A0[sh.index(0, 0, 0, 1)], 0.0, 1e-12);
    if (prev > 0.0) EXPECT_NEAR(std::log2(prev / diff), 2.0, 0.3) << "M = " << M;
    prev = diff;
  }
}

TEST(Cell, EvenCoefficientHasVanishingThirdOrderTensor) {
  const CorrectorSet cs = compute_correctors(build_tensor(checkerboard(false), 32), {}, true);
  EXPECT_LT(max_abs(cs.c), 1e-10);
  EXPECT_LT(cs.mean_b_defect, 1e-9);
}

TEST(Cell, NonCentrosymmetricCoefficientHasNonzeroThirdOrderTensor) {
  // no s with a(s - y) = a(y); for scalar a the adjoint cell problems give
  // c^{abg} = mean(a (chi^b d_a chi^g - chi^g d_a chi^b)), antisymmetric in (b, g)
  ScalarTensor s;
  s.coefficient = [](std::span<const double> y) {
    return 2.0 + std::cos(kTwoPi * y[0]) + 0.5 * std::sin(kTwoPi * y[1]) + 0.3 * std::sin(kTwoPi * (y[0] + 2 * y[1]));
  };
  const CorrectorSet cs = compute_correctors(build_tensor(s, 64), {}, true);
  EXPECT_GT(max_abs(cs.c), 1e-4);
  EXPECT_LT(cs.mean_b_defect, 1e-9);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int g = 0; g < 2; ++g)
        EXPECT_NEAR(cs.c[cs.c_index(a, b, g, 0, 0)], -cs.c[cs.c_index(a, g, b, 0, 0)], 1e-5);
}

TEST(Cell, ZeroMeanCorrectors) {
  const CorrectorSet cs = compute_correctors(build_tensor(checkerboard(false), 32), {}, true);
  for (const auto& f : cs.chi)
    for (int c = 0; c < f.components(); ++c) EXPECT_LT(std::abs(f.mean(c)), 1e-12);
  for (const auto& f : cs.upsilon)
    for (int c = 0; c < f.components(); ++c) EXPECT_LT(std::abs(f.mean(c)), 1e-12);
}

TEST(Cell, HomogenizedTensorKeepsEllipticityBounds) {
  const TensorField A = build_tensor(checkerboard(false), 32);
  const CorrectorSet cs = compute_correctors(A, {}, false);
  const auto [lo, hi] = form_eigen_bounds(cs.shape, cs.A0);
  EXPECT_GE(lo, A.lambda_min() - 1e-12);
  EXPECT_LE(hi, A.lambda_max() + 1e-12);
}

TEST(Cell, ScalingCoefficientScalesA0Only) {
  ScalarTensor s = checkerboard(false), s2 = s;
  s2.coefficient = [f = s.coefficient](std::span<const double> y) { return 2.0 * f(y); };
  const CorrectorSet a = compute_correctors(build_tensor(s, 16), {}, false);
  const CorrectorSet b = compute_correctors(build_tensor(s2, 16), {}, false);
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(b.A0[k], 2.0 * a.A0[k], 1e-10);
  for (std::size_t p = 0; p < a.chi[0].data().size(); ++p) EXPECT_NEAR(a.chi[0].data()[p], b.chi[0].data()[p], 1e-9);
}

TEST(Cell, ExpansionAboveSecondOrderUnsupported) {
  const CorrectorSet cs = compute_correctors(build_tensor(layered(), 8), {}, true);
  GridFunction u;
  EXPECT_THROW(assemble_expansion(u, {}, cs, 0.1, 3), UnsupportedError);
}
