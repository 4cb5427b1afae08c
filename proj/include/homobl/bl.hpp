#pragma once

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "homobl/datum.hpp"
#include "homobl/fit.hpp"
#include "homobl/linsolve.hpp"
#include "homobl/tensor.hpp"

namespace homobl {

// Half-space boundary layers in d = 2.
//
// For an inward unit normal n the tangent is tau = (-n2, n1); the rotation R
// has rows tau and n, so y = z1 tau + z2 n and the layer lives in z2 > a.
// Coefficients become B(z) = R A(R^T z) R^T and the boundary trace is
// psi(z1) = phi(z1 tau + a n).

/// Integer direction (p, q), gcd 1, with n parallel to (p, q).
struct RationalDirection {
  std::array<int, 2> vec{};
  double period = 1.0;  ///< |(p, q)|, the z1-period of the rotated problem
};

inline constexpr int kMaxDenominator = 1000;
inline constexpr double kRationalTol = 1e-10;

/// Continued-fraction match of the slope of n, denominators up to 1000.
std::optional<RationalDirection> rational_direction(std::span<const double> n);

/// Rows tau and n of the rotation for normal n.
void rotation_rows(std::span<const double> n, double R[2][2]);

using StripCoefficient = std::function<void(double z1, double z2, std::span<double> out)>;
using StripTrace = std::function<void(double z1, std::span<double> out)>;

struct StripProblem {
  int components = 1;
  std::array<double, 2> normal{0.0, 1.0};
  RationalDirection direction;
  StripCoefficient B;  ///< TensorShape{2, N} entries in z coordinates
  StripTrace psi;      ///< boundary trace on z2 = a, period direction.period
};

/// Rotated coefficients and trace for a rational normal. `phi` maps y to the
/// datum phi(x0, y). Throws ClassificationError for non-rational n.
StripProblem rotate_to_strip(const TensorField& A, std::span<const double> n, PointFn phi, double a);

struct StripOptions {
  int resolution = 64;   ///< nodes per unit length along z1 (and z2 unless dz set)
  double height = 0.0;   ///< L; 0 selects 10 periods
  double dz = 0.0;       ///< vertical spacing; 0 uses the tangential spacing
  bool auto_height = true;
  int max_doublings = 3;
  SolveOptions solver;
};

struct EnlargedOptions {
  int modes = 8;        ///< M_theta: Fourier modes |m|_inf <= M_theta per axis
  double height = 0.0;  ///< L; 0 selects 10 / k_min
  double dt = 0.0;      ///< t spacing; 0 selects 0.05 / k_max
  int max_rows = 4000;
  bool auto_height = true;
  int max_doublings = 3;
  SolveOptions solver;
};

inline constexpr double kDecayTarget = 1e-3;     ///< F(a + L/2) / F(a) aimed for
inline constexpr double kTruncationRatio = 0.5;  ///< above this the tail is unreliable
inline constexpr double kFlatEnergy = 1e-14;     ///< F(a) below this, relative to max|V|^2, is a constant layer

struct BLSolution {
  std::string path;  ///< "rational" or "quasiperiodic"
  int components = 1;
  std::array<double, 2> normal{};
  double a = 0.0;
  double height = 0.0;
  std::vector<double> U_inf;
  std::vector<double> t, F;  ///< F(t_k) at every grid row
  DecayFit decay;
  double decay_ratio = 0.0;  ///< F(a + L/2) / F(a)
  bool truncation_warning = false;
  int doublings = 0;
  SolveStats stats;

  // Field: rows of n_row nodes each, N components per node. For the strip the
  // row is z1 in [0, period); for the enlarged solve it is the theta grid,
  // axis 0 fastest.
  int row_nodes = 0;
  int rows = 0;
  double row_spacing = 0.0;  ///< z1 spacing (strip) or 1/M_g (enlarged)
  double dz = 0.0;
  std::vector<double> V;

  // enlarged solves only
  int grid_modes = 0;  ///< M_g = 2 M_theta + 1
  std::array<double, 2> lambda{};

  double value(int row, int node, int comp) const {
    return V[(static_cast<std::size_t>(row) * row_nodes + node) * components + comp];
  }
};

/// Dirichlet psi on z2 = a, periodic in z1, zero flux on z2 = a + L.
BLSolution solve_strip_rational(const StripProblem& problem, double a, const StripOptions& opts = {});

using EnlargedCoefficient = std::function<void(std::span<const double> theta, double t, std::span<double> out)>;

struct EnlargedProblem {
  int components = 1;
  std::array<double, 2> normal{};
  std::array<double, 2> lambda{};  ///< tau, the tangential frequency vector
  EnlargedCoefficient B;           ///< B(theta, t) = R A(theta + t n) R^T
  PointFn P;                       ///< P(theta) = phi(theta + a n)
};

/// Enlarged torus problem of a (typically irrational) normal.
EnlargedProblem lift_quasiperiodic(const TensorField& A, std::span<const double> n, PointFn phi, double a);

/// D.(B D V) = 0 on T^2 x [a, a + L] with D = (lambda.grad_theta, d_t):
/// Fourier collocation in theta, second-order differences in t, V = P at
/// t = a, zero flux at t = a + L.
BLSolution solve_enlarged(const EnlargedProblem& problem, double a, const EnlargedOptions& opts = {});

/// 2 pi |lambda.m| for the mode m with theta on the unit torus.
double mode_rate(std::span<const double> lambda, std::span<const int> m);

struct TailReport {
  std::vector<double> U_inf;
  DecayClass decay = DecayClass::None;
  double decay_rate = 0.0;
  std::optional<double> sensitivity;  ///< max_i |U_inf(a)_i - U_inf(a')_i|
};

/// Throws UnreliableTailError when either solve flagged truncation.
TailReport tail_constant(const BLSolution& sol, const BLSolution* alternative = nullptr);

/// Path choice for boundary-layer solves.
struct BLOptions {
  StripOptions strip;
  EnlargedOptions enlarged;
};

/// Rational normals go to the strip solver, all others to the enlarged one.
BLSolution solve_boundary_layer(const TensorField& A, std::span<const double> n, const PointFn& phi, double a,
                                const BLOptions& opts = {});

/// U(0, y2) = (1/pi) int_R y2 / (y2^2 + t^2) phi(t) dt for 1-periodic phi,
/// via the periodized kernel and adaptive Gauss-Kronrod quadrature.
double poisson_kernel_reference(const std::function<double(double)>& phi, double y2, double tol = 1e-12);

}  // namespace homobl
