#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <string>

namespace homobl {

using LinearMap = std::function<void(std::span<const double> in, std::span<double> out)>;

struct SolveOptions {
  double rtol = 1e-10;  ///< on ||b - Ax|| / ||b||
  int max_iter = 10000;
};

struct SolveStats {
  int iterations = 0;
  double residual = 0.0;  ///< final relative residual
  bool converged = false;
};

/// Preconditioned conjugate gradients for a symmetric positive (semi)definite
/// operator. `x` holds the initial guess on entry.
SolveStats pcg(const LinearMap& A, const LinearMap& precond, std::span<const double> b,
               std::span<double> x, const SolveOptions& opts);

/// Right-preconditioned BiCGStab for nonsymmetric operators.
SolveStats bicgstab(const LinearMap& A, const LinearMap& precond, std::span<const double> b,
                    std::span<double> x, const SolveOptions& opts);

/// Throws SolverError unless the solve converged.
void require_converged(const SolveStats& stats, const std::string& what);

/// Neumaier-compensated sum.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) comp_ += (sum_ - t) + v;
    else comp_ += (v - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

}  // namespace homobl
