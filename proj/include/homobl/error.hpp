#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace homobl {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Grid resolution below the supported minimum, or a mesh that does not
/// resolve the oscillation scale.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

/// A coefficient profile that is not positive at some node.
class EllipticityError : public Error {
 public:
  EllipticityError(const std::string& what, std::vector<double> node)
      : Error(what), node_(std::move(node)) {}
  const std::vector<double>& node() const { return node_; }

 private:
  std::vector<double> node_;
};

/// Evaluation outside the declared boundary chart, or an empty subdomain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Inputs defined on incompatible grids or with incompatible sizes.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Krylov iteration stopped before reaching the requested tolerance.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, int iterations, double residual)
      : Error(what), iterations_(iterations), residual_(residual) {}
  int iterations() const { return iterations_; }
  double residual() const { return residual_; }

 private:
  int iterations_;
  double residual_;
};

/// A normal that could not be matched to an integer direction.
class ClassificationError : public Error {
 public:
  using Error::Error;
};

/// Tail constant requested from a boundary-layer solve that flagged truncation.
class UnreliableTailError : public Error {
 public:
  using Error::Error;
};

class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// Invalid input to a rate or decay fit.
class FitError : public Error {
 public:
  using Error::Error;
};

/// Aggregated configuration problems; `messages()` lists every one found.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> messages);
  const std::vector<std::string>& messages() const { return messages_; }

 private:
  std::vector<std::string> messages_;
};

}  // namespace homobl
