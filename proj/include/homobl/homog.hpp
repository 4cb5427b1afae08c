#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "homobl/bl.hpp"
#include "homobl/cell.hpp"
#include "homobl/datum.hpp"
#include "homobl/dioph.hpp"
#include "homobl/domain.hpp"
#include "homobl/fit.hpp"
#include "homobl/linsolve.hpp"
#include "homobl/tensor.hpp"

namespace homobl {

inline constexpr int kMinCellsPerEps = 8;

struct FineSolution {
  double eps = 0.0;
  GridFunction u;
  SolveStats stats;
};

/// -div(A(x/eps) grad u) = f in the domain, u = phi(x, x/eps) on the boundary
/// nodes (phi read at the nearest boundary point). Refuses h > eps/8.
FineSolution solve_fine(const TensorField& A, const DirichletDatum& phi, const PointFn& f, double eps,
                        const Domain& domain, double h, const SolveOptions& opts = {});

using BoundaryFn = std::function<void(const BoundaryPoint& p, std::span<double> out)>;

struct HomogenizedSolution {
  GridFunction u0;
  std::vector<double> A0;
  SolveStats stats;
};

/// -div(A0 grad u0) = f with u0 = g on the boundary nodes.
HomogenizedSolution solve_homogenized(std::span<const double> A0, int components, const BoundaryFn& g,
                                      const PointFn& f, const Domain& domain, double h,
                                      const SolveOptions& opts = {});

struct PhiStarOptions {
  double kappa = 0.01;
  int truncation = kDefaultTruncation;
  double exponent = 2.0;
  BLOptions bl;
  int threads = 1;
};

/// Tails of one side of the boundary.
struct PhiStarSide {
  int side = 0;
  std::array<double, 2> inward{};
  double offset = 0.0;  ///< a = x0.n_in / eps along the side
  std::string path;     ///< "rational", "quasiperiodic" or "excluded"
  double kappa_obs = 0.0;
  std::vector<std::vector<double>> tails;  ///< U_inf per oscillating term
};

/// Homogenized boundary datum phi*(x0) = U_inf(phi(x0, .)).
///
/// The datum's separated form gives phi* = g + sum_k w_k U_inf(p_k), with one
/// boundary-layer solve per term and side. Rational sides use the strip
/// solver; irrational sides whose normal lies in A_kappa use the enlarged
/// solver; the rest are excluded and filled from the nearest included point
/// along the boundary.
class PhiStar {
 public:
  PhiStar(const DirichletDatum& phi, const Domain& domain, std::vector<PhiStarSide> sides);

  void operator()(const BoundaryPoint& p, std::span<double> out) const;
  /// True when p lies on an excluded side.
  bool filled(const BoundaryPoint& p) const { return sides_[p.side].path == "excluded"; }
  const std::vector<PhiStarSide>& sides() const { return sides_; }

 private:
  void included_value(const BoundaryPoint& p, std::span<double> out) const;

  DirichletDatum phi_;
  Domain domain_;
  std::vector<PhiStarSide> sides_;
};

PhiStar boundary_data_star(const TensorField& A, const DirichletDatum& phi, const Domain& domain, double eps,
                           const PhiStarOptions& opts);

/// -div(A0 grad ubar1) = c^{abg} d_abg u0 with ubar1 = -U_inf(chi^a) d_a u0 on
/// the boundary. `chi_tails[side][a]` holds the N x N tail of chi^a on that
/// side (row-major).
GridFunction solve_ubar1(const CorrectorSet& cs, const GridFunction& u0,
                         const std::vector<std::vector<std::vector<double>>>& chi_tails, const Domain& domain,
                         const SolveOptions& opts = {});

/// Tails of the correctors chi^a on each side, from the same boundary-layer
/// dispatch as phi*. Excluded sides take the tail of the nearest included side.
std::vector<std::vector<std::vector<double>>> corrector_tails(const TensorField& A, const CorrectorSet& cs,
                                                               const Domain& domain, double eps,
                                                               const PhiStar& phi_star, const PhiStarOptions& opts);

struct ErrorNorms {
  double l2 = 0.0;           ///< ||u - v||_{L2(domain)}
  double h1_interior = 0.0;  ///< ||u - v||_{H1(omega)}, omega = {dist > margin}
};

ErrorNorms error_norms(const GridFunction& u, std::span<const double> v, const Domain& domain, double margin);

struct SweepSpec {
  TensorSpec tensor;
  DirichletDatum datum;
  PointFn source;
  DomainSpec domain;
  std::vector<double> eps;
  int order = 0;  ///< 1 adds the interior comparison with u0 + eps u1
  double margin = 0.2;
  int cells_per_eps = kMinCellsPerEps;
  PhiStarOptions phi_star;
  SolveOptions solver;
  int threads = 1;
};

struct SweepRow {
  double eps = 0.0;
  double h = 0.0;
  double l2 = 0.0;            ///< fine vs u0(phi*)
  double h1_interior = 0.0;   ///< fine vs u0(phi*), interior
  double l2_order1 = 0.0;     ///< fine vs order-1 expansion (order >= 1)
  double h1_order1 = 0.0;
  double u0_norm = 0.0;  ///< ||u0||_{L2}, scale for the noise floor
  int fine_iterations = 0;
  int excluded_sides = 0;
  std::string failure;  ///< empty on success
};

struct ConvergenceReport {
  std::vector<SweepRow> rows;
  std::optional<RateFit> l2_rate;
  std::optional<RateFit> h1_rate;
  std::optional<RateFit> h1_order1_rate;
  double threshold = 0.0;  ///< (d-1)/(3d+5)
  bool below_noise = false;
  bool l2_monotone = false;
  std::vector<double> A0;
  std::vector<std::string> failures;
};

/// Relative level below which sweep errors count as solver noise.
inline constexpr double kNoiseFloor = 1e-8;

/// One sweep row: correctors at M = cells_per_eps, phi*, homogenized and fine
/// solves on the mesh h = eps / cells_per_eps, and error norms.
SweepRow sweep_point(const SweepSpec& spec, double eps, int cells_per_eps);

ConvergenceReport run_sweep(const SweepSpec& spec);

}  // namespace homobl
