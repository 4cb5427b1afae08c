#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "homobl/grid.hpp"

namespace homobl {

/// Index layout of a tensor A^{ab}_{ij}: a,b < dim (space), i,j < components.
struct TensorShape {
  int dim = 2;
  int components = 1;

  int entries() const { return dim * dim * components * components; }
  int block() const { return components * components; }
  int index(int a, int b, int i, int j) const {
    return ((a * dim + b) * components + i) * components + j;
  }
  bool operator==(const TensorShape&) const = default;
};

/// Finite Fourier sum c0 + sum_k [c_k cos(2 pi k.y) + s_k sin(2 pi k.y)].
struct TrigPolynomial {
  struct Term {
    std::vector<int> wave;
    double cos_coef = 0.0;
    double sin_coef = 0.0;
  };
  double constant = 0.0;
  std::vector<Term> terms;

  double operator()(std::span<const double> y) const;

  /// Projects a periodic function onto the modes |k|_inf <= max_wave and
  /// verifies the reconstruction at off-grid probe points. Throws when the
  /// function is not such a polynomial to within `tol`.
  static TrigPolynomial fit(const std::function<double(std::span<const double>)>& f, int dim,
                            int max_wave = 8, double tol = 1e-10);
};

/// A^{ab}_{ij} constant in y.
struct ConstantTensor {
  TensorShape shape;
  std::vector<double> entries;
};

/// a(y_axis) * delta_{ab} * delta_{ij}, with a a positive 1-periodic profile.
struct LayeredTensor {
  std::function<double(double)> profile;
  int axis = 0;
  int dim = 2;
  int components = 1;
};

/// Every entry a finite trigonometric polynomial in y.
struct TrigonometricTensor {
  TensorShape shape;
  std::vector<TrigPolynomial> entries;
};

/// a(y) * delta_{ab} * delta_{ij}, with a smooth, positive and 1-periodic.
struct ScalarTensor {
  std::function<double(std::span<const double>)> coefficient;
  int dim = 2;
  int components = 1;
};

using TensorSpec = std::variant<ConstantTensor, LayeredTensor, TrigonometricTensor, ScalarTensor>;

TensorShape shape_of(const TensorSpec& spec);
/// Exact value of the builder formula at y (all entries).
void evaluate_spec(const TensorSpec& spec, std::span<const double> y, std::span<double> out);

/// Periodic coefficient tensor tabulated on the torus grid.
class TensorField {
 public:
  TensorField(TensorSpec spec, TorusField values);

  const TensorShape& shape() const { return shape_; }
  int dim() const { return shape_.dim; }
  int components() const { return shape_.components; }
  int resolution() const { return values_.grid().resolution(); }
  const TorusGrid& grid() const { return values_.grid(); }
  const TorusField& values() const { return values_; }
  const TensorSpec& spec() const { return spec_; }

  std::span<const double> at(std::size_t node) const { return values_.at(node); }
  double entry(std::size_t node, int a, int b, int i, int j) const {
    return values_.at(node)[shape_.index(a, b, i, j)];
  }
  /// Bilinear (multilinear) interpolation between grid nodes.
  void interpolate(std::span<const double> y, std::span<double> out) const {
    values_.interpolate(y, out);
  }

  /// Extremal eigenvalues of the symmetrized quadratic form over all nodes.
  double lambda_min() const { return lambda_min_; }
  double lambda_max() const { return lambda_max_; }
  /// Largest lambda with lambda <= A <= 1/lambda at every node.
  double lambda() const;

  /// A^{ab}_{ij} == A^{ba}_{ji} at every node.
  bool symmetric(double tol = 1e-14) const;

  /// The same builder tabulated at another resolution.
  TensorField resample(int resolution) const;

 private:
  TensorSpec spec_;
  TensorShape shape_;
  TorusField values_;
  double lambda_min_ = 0.0;
  double lambda_max_ = 0.0;
};

/// Tabulates a builder on the torus grid with M nodes per axis (M >= 4).
TensorField build_tensor(const TensorSpec& spec, int resolution);

struct EllipticityReport {
  double lambda_claimed = 0.0;
  double lambda_min = 0.0;  ///< smallest Rayleigh quotient (exact, via eigenvalues)
  double lambda_max = 0.0;
  double sampled_min = 0.0;  ///< extremes over the random probe vectors
  double sampled_max = 0.0;
  bool pass = false;
  std::size_t worst_node = 0;
  std::vector<double> worst_point;
};

inline constexpr double kEllipticityTol = 1e-12;

EllipticityReport validate_ellipticity(const TensorField& A, double lambda, int samples,
                                       std::uint64_t seed = 0);

/// Smallest and largest eigenvalue of the symmetrized (dN x dN) form of one
/// node's entries.
std::pair<double, double> form_eigen_bounds(const TensorShape& shape, std::span<const double> entries);

/// R A R^T blockwise for a 2x2 rotation given by its rows (tangent, normal).
void rotate_entries(const TensorShape& shape, const double rot[2][2], std::span<const double> in,
                    std::span<double> out);

/// One row per node: y-coordinates, then the flattened entries.
void write_tensor_csv(const TensorField& A, std::ostream& os);

}  // namespace homobl
