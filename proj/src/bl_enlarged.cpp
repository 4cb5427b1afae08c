#include <cmath>
#include <complex>
#include <fftw3.h>
#include <fmt/format.h>
#include <limits>
#include <mutex>
#include <numbers>

#include "bl_common.hpp"
#include "homobl/error.hpp"

namespace homobl {

double mode_rate(std::span<const double> lambda, std::span<const int> m) {
  return 2.0 * std::numbers::pi * std::abs(lambda[0] * m[0] + lambda[1] * m[1]);
}

EnlargedProblem lift_quasiperiodic(const TensorField& A, std::span<const double> n, PointFn phi, double a) {
  if (A.dim() != 2 || n.size() != 2) throw UnsupportedError("boundary layers are implemented for d = 2");
  const double len = std::hypot(n[0], n[1]);
  if (std::abs(len - 1.0) > 1e-12) throw DomainError(fmt::format("normal has length {} instead of 1", len));
  EnlargedProblem p;
  p.components = A.components();
  p.normal = {n[0], n[1]};
  double R[2][2];
  rotation_rows(n, R);
  p.lambda = {R[0][0], R[0][1]};
  const TensorShape shape = A.shape();
  const TensorSpec spec = A.spec();
  const double n0 = n[0], n1 = n[1];
  p.B = [=](std::span<const double> theta, double t, std::span<double> out) {
    const double y[2] = {theta[0] + t * n0, theta[1] + t * n1};
    std::vector<double> tmp(shape.entries());
    evaluate_spec(spec, y, tmp);
    rotate_entries(shape, R, tmp, out);
  };
  p.P = [=, phi = std::move(phi)](std::span<const double> theta, std::span<double> out) {
    const double y[2] = {theta[0] + a * n0, theta[1] + a * n1};
    phi(y, out);
  };
  return p;
}

namespace {

// The FFTW planner is not reentrant; execution on distinct arrays is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// Batched 2D real transforms of `rows` theta grids of size Mg x Mg.
class RowTransform {
 public:
  RowTransform(int Mg, int rows) : Mg_(Mg), rows_(rows), half_(Mg / 2 + 1) {
    real_ = fftw_alloc_real(static_cast<std::size_t>(rows) * Mg * Mg);
    spec_ = fftw_alloc_complex(static_cast<std::size_t>(rows) * Mg * half_);
    const int dims[2] = {Mg, Mg};
    std::lock_guard lock(planner_mutex());
    forward_ = fftw_plan_many_dft_r2c(2, dims, rows, real_, nullptr, 1, Mg * Mg, spec_, nullptr, 1, Mg * half_,
                                      FFTW_ESTIMATE);
    backward_ = fftw_plan_many_dft_c2r(2, dims, rows, spec_, nullptr, 1, Mg * half_, real_, nullptr, 1, Mg * Mg,
                                       FFTW_ESTIMATE);
    if (!forward_ || !backward_) throw Error("FFTW planning failed");
  }
  RowTransform(const RowTransform&) = delete;
  RowTransform& operator=(const RowTransform&) = delete;
  ~RowTransform() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
    fftw_free(real_);
    fftw_free(spec_);
  }

  double* real() { return real_; }
  std::complex<double>* spectrum() { return reinterpret_cast<std::complex<double>*>(spec_); }
  void forward() { fftw_execute(forward_); }
  /// Inverse transform, normalized.
  void backward() {
    fftw_execute(backward_);
    const double s = 1.0 / (static_cast<double>(Mg_) * Mg_);
    const std::size_t n = static_cast<std::size_t>(rows_) * Mg_ * Mg_;
    for (std::size_t i = 0; i < n; ++i) real_[i] *= s;
  }
  int modes_per_row() const { return Mg_ * half_; }
  /// Integer wave vector (m1, m2) of spectrum slot k within a row.
  void wave(int k, int m[2]) const {
    const int k0 = k / half_, k1 = k % half_;
    m[0] = k1;
    m[1] = k0 <= Mg_ / 2 ? k0 : k0 - Mg_;
  }

 private:
  int Mg_, rows_, half_;
  double* real_ = nullptr;
  fftw_complex* spec_ = nullptr;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

class EnlargedOperator {
 public:
  EnlargedOperator(const EnlargedProblem& p, int Mtheta, int rows, double a, double dt)
      : N_(p.components), Mg_(2 * Mtheta + 1), nth_(Mg_ * Mg_), rows_(rows), dt_(dt), lambda_(p.lambda),
        fft_(Mg_, rows) {
    const TensorShape shape{2, N_};
    const int E = shape.entries();
    coeffs_.resize(static_cast<std::size_t>(rows_) * nth_ * E);
    std::vector<double> theta(2);
    for (int j = 0; j < rows_; ++j)
      for (int q = 0; q < nth_; ++q) {
        theta[0] = static_cast<double>(q % Mg_) / Mg_;
        theta[1] = static_cast<double>(q / Mg_) / Mg_;
        p.B(theta, a + j * dt_, std::span<double>(coeffs_.data() + (static_cast<std::size_t>(j) * nth_ + q) * E, E));
      }
    for (std::size_t k = 0; k < coeffs_.size() / E && symmetric_; ++k) {
      const double* c = coeffs_.data() + k * E;
      for (int i = 0; i < N_; ++i)
        for (int l = 0; l < N_; ++l) {
          if (std::abs(c[shape.index(0, 1, i, l)] - c[shape.index(1, 0, l, i)]) > 1e-14) symmetric_ = false;
          for (int s = 0; s < 2; ++s)
            if (std::abs(c[shape.index(s, s, i, l)] - c[shape.index(s, s, l, i)]) > 1e-14) symmetric_ = false;
        }
    }
    mu_.resize(fft_.modes_per_row());
    for (int k = 0; k < fft_.modes_per_row(); ++k) {
      int m[2];
      fft_.wave(k, m);
      mu_[k] = 2.0 * std::numbers::pi * (lambda_[0] * m[0] + lambda_[1] * m[1]);
    }
    build_preconditioner();
  }

  bool symmetric() const { return symmetric_; }
  std::size_t size() const { return static_cast<std::size_t>(rows_) * nth_ * N_; }
  double volume(int row) const { return row == rows_ - 1 ? 0.5 * dt_ : dt_; }
  const double* coeff(int row, int q) const {
    return coeffs_.data() + (static_cast<std::size_t>(row) * nth_ + q) * 4 * N_ * N_;
  }
  int entry(int a, int b, int i, int j) const { return ((a * 2 + b) * N_ + i) * N_ + j; }

  /// out = lambda.grad_theta u, every row and component.
  void tangential(std::span<const double> u, std::span<double> out) {
    for (int c = 0; c < N_; ++c) {
      double* buf = fft_.real();
      for (std::size_t k = 0; k < static_cast<std::size_t>(rows_) * nth_; ++k) buf[k] = u[k * N_ + c];
      fft_.forward();
      std::complex<double>* s = fft_.spectrum();
      const int per = fft_.modes_per_row();
      for (int j = 0; j < rows_; ++j)
        for (int k = 0; k < per; ++k) s[static_cast<std::size_t>(j) * per + k] *= std::complex<double>(0.0, mu_[k]);
      fft_.backward();
      for (std::size_t k = 0; k < static_cast<std::size_t>(rows_) * nth_; ++k) out[k * N_ + c] = buf[k];
    }
  }

  /// Nodal t-derivative at (row j, node q), component c.
  double dt_node(std::span<const double> u, int j, int q, int c) const {
    auto at = [&](int r) { return u[(static_cast<std::size_t>(r) * nth_ + q) * N_ + c]; };
    if (j == 0) return (at(1) - at(0)) / dt_;
    if (j == rows_ - 1) return (at(j) - at(j - 1)) / dt_;
    return (at(j + 1) - at(j - 1)) / (2.0 * dt_);
  }

  void apply(std::span<const double> u, std::span<double> out) {
    const std::size_t n = size();
    std::fill(out.begin(), out.end(), 0.0);
    std::vector<double> g1(n), w(n);
    tangential(u, g1);
    // tangential fluxes vol (B11 D1 u + B12 d_t u); their D1^T = -D1 image
    std::vector<double> gt(N_);
    for (int j = 0; j < rows_; ++j) {
      const double vol = volume(j);
      for (int q = 0; q < nth_; ++q) {
        const std::size_t base = (static_cast<std::size_t>(j) * nth_ + q) * N_;
        const double* c = coeff(j, q);
        for (int l = 0; l < N_; ++l) gt[l] = dt_node(u, j, q, l);
        for (int i = 0; i < N_; ++i) {
          double s = 0.0;
          for (int l = 0; l < N_; ++l) s += c[entry(0, 0, i, l)] * g1[base + l] + c[entry(0, 1, i, l)] * gt[l];
          w[base + i] = vol * s;
        }
      }
    }
    tangential(w, g1);
    for (std::size_t k = 0; k < n; ++k) out[k] -= g1[k];

    // normal faces between rows j and j+1
    for (int j = 0; j + 1 < rows_; ++j)
      for (int q = 0; q < nth_; ++q) {
        const double *c0 = coeff(j, q), *c1 = coeff(j + 1, q);
        const std::size_t b0 = (static_cast<std::size_t>(j) * nth_ + q) * N_, b1 = b0 + static_cast<std::size_t>(nth_) * N_;
        for (int i = 0; i < N_; ++i) {
          double flux = 0.0;
          for (int l = 0; l < N_; ++l)
            flux += 0.5 * (c0[entry(1, 1, i, l)] + c1[entry(1, 1, i, l)]) * (u[b1 + l] - u[b0 + l]);
          flux /= dt_;
          out[b0 + i] -= flux;
          out[b1 + i] += flux;
        }
      }

    // mixed term d_t^T (vol B21 D1 u)
    if (!has_mixed()) return;
    std::vector<double> g(n);
    tangential(u, g);
    for (int j = 0; j < rows_; ++j) {
      const double vol = volume(j);
      for (int q = 0; q < nth_; ++q) {
        const std::size_t base = (static_cast<std::size_t>(j) * nth_ + q) * N_;
        const std::size_t stride = static_cast<std::size_t>(nth_) * N_;
        const double* c = coeff(j, q);
        for (int i = 0; i < N_; ++i) {
          double f = 0.0;
          for (int l = 0; l < N_; ++l) f += c[entry(1, 0, i, l)] * g[base + l];
          f *= vol;
          if (j == 0) {
            out[base + stride + i] += f / dt_;
            out[base + i] -= f / dt_;
          } else if (j == rows_ - 1) {
            out[base + i] += f / dt_;
            out[base - stride + i] -= f / dt_;
          } else {
            out[base + stride + i] += f / (2.0 * dt_);
            out[base - stride + i] -= f / (2.0 * dt_);
          }
        }
      }
    }
  }

  void apply_unknowns(std::span<const double> u, std::span<double> out) {
    apply(u, out);
    std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(nth_) * N_, 0.0);
  }

  /// Mode-by-mode tridiagonal solve with theta-averaged B11, B22; exact when
  /// B does not depend on theta and has no mixed blocks.
  void precondition(std::span<const double> r, std::span<double> z) {
    const int per = fft_.modes_per_row();
    for (int c = 0; c < N_; ++c) {
      double* buf = fft_.real();
      for (std::size_t k = 0; k < static_cast<std::size_t>(rows_) * nth_; ++k) buf[k] = r[k * N_ + c];
      std::fill(buf, buf + nth_, 0.0);
      fft_.forward();
      std::complex<double>* s = fft_.spectrum();
      std::vector<std::complex<double>> d(rows_);
      for (int k = 0; k < per; ++k) {
        const double* cp = cprime_.data() + (static_cast<std::size_t>(c) * per + k) * rows_;
        const double* den = denom_.data() + (static_cast<std::size_t>(c) * per + k) * rows_;
        // forward sweep over rows 1..rows-1, then back substitution
        for (int j = 1; j < rows_; ++j) {
          const std::complex<double> rhs = s[static_cast<std::size_t>(j) * per + k];
          const double lower = j > 1 ? -face_[static_cast<std::size_t>(c) * rows_ + j - 1] / dt_ : 0.0;
          d[j] = (rhs - lower * (j > 1 ? d[j - 1] : 0.0)) / den[j];
        }
        for (int j = rows_ - 2; j >= 1; --j) d[j] -= cp[j] * d[j + 1];
        s[k] = 0.0;
        for (int j = 1; j < rows_; ++j) s[static_cast<std::size_t>(j) * per + k] = d[j];
      }
      fft_.backward();
      for (std::size_t k = 0; k < static_cast<std::size_t>(rows_) * nth_; ++k) z[k * N_ + c] = buf[k];
      for (int q = 0; q < nth_; ++q) z[static_cast<std::size_t>(q) * N_ + c] = 0.0;
    }
  }

  /// Row energies mean_theta |D1 u|^2 and face energies mean_theta |d_t u|^2.
  void energies(std::span<const double> u, std::vector<double>& row_e, std::vector<double>& face_e) {
    std::vector<double> g(size());
    tangential(u, g);
    row_e.assign(rows_, 0.0);
    face_e.assign(rows_, 0.0);
    for (int j = 0; j < rows_; ++j) {
      CompensatedSum sr, sf;
      for (int q = 0; q < nth_; ++q)
        for (int c = 0; c < N_; ++c) {
          const std::size_t k = (static_cast<std::size_t>(j) * nth_ + q) * N_ + c;
          sr.add(g[k] * g[k]);
          if (j + 1 < rows_) {
            const double dv = (u[k + static_cast<std::size_t>(nth_) * N_] - u[k]) / dt_;
            sf.add(dv * dv);
          }
        }
      row_e[j] = sr.value() / nth_;
      face_e[j] = sf.value() / nth_;
    }
  }

  int theta_nodes() const { return nth_; }
  int grid_modes() const { return Mg_; }

 private:
  bool has_mixed() const {
    if (mixed_checked_) return mixed_;
    mixed_checked_ = true;
    const int E = 4 * N_ * N_;
    for (std::size_t k = 0; k < coeffs_.size() / E && !mixed_; ++k)
      for (int i = 0; i < N_; ++i)
        for (int l = 0; l < N_; ++l)
          if (coeffs_[k * E + entry(0, 1, i, l)] != 0.0 || coeffs_[k * E + entry(1, 0, i, l)] != 0.0) mixed_ = true;
    return mixed_;
  }

  void build_preconditioner() {
    const int per = fft_.modes_per_row();
    std::vector<double> b11(static_cast<std::size_t>(N_) * rows_, 0.0), b22(static_cast<std::size_t>(N_) * rows_, 0.0);
    for (int c = 0; c < N_; ++c)
      for (int j = 0; j < rows_; ++j) {
        double s11 = 0.0, s22 = 0.0;
        for (int q = 0; q < nth_; ++q) {
          s11 += coeff(j, q)[entry(0, 0, c, c)];
          s22 += coeff(j, q)[entry(1, 1, c, c)];
        }
        b11[static_cast<std::size_t>(c) * rows_ + j] = s11 / nth_;
        b22[static_cast<std::size_t>(c) * rows_ + j] = s22 / nth_;
      }
    face_.assign(static_cast<std::size_t>(N_) * rows_, 0.0);
    for (int c = 0; c < N_; ++c)
      for (int j = 0; j + 1 < rows_; ++j)
        face_[static_cast<std::size_t>(c) * rows_ + j] =
            0.5 * (b22[static_cast<std::size_t>(c) * rows_ + j] + b22[static_cast<std::size_t>(c) * rows_ + j + 1]);
    cprime_.assign(static_cast<std::size_t>(N_) * per * rows_, 0.0);
    denom_.assign(static_cast<std::size_t>(N_) * per * rows_, 1.0);
    for (int c = 0; c < N_; ++c) {
      const double* f = face_.data() + static_cast<std::size_t>(c) * rows_;
      for (int k = 0; k < per; ++k) {
        double* cp = cprime_.data() + (static_cast<std::size_t>(c) * per + k) * rows_;
        double* den = denom_.data() + (static_cast<std::size_t>(c) * per + k) * rows_;
        const double mu2 = mu_[k] * mu_[k];
        for (int j = 1; j < rows_; ++j) {
          double diag = volume(j) * b11[static_cast<std::size_t>(c) * rows_ + j] * mu2 + f[j - 1] / dt_;
          if (j + 1 < rows_) diag += f[j] / dt_;
          const double lower = j > 1 ? -f[j - 1] / dt_ : 0.0;
          den[j] = diag - (j > 1 ? lower * cp[j - 1] : 0.0);
          cp[j] = j + 1 < rows_ ? (-f[j] / dt_) / den[j] : 0.0;
        }
      }
    }
  }

  int N_, Mg_, nth_, rows_;
  double dt_;
  std::array<double, 2> lambda_;
  RowTransform fft_;
  std::vector<double> coeffs_;
  std::vector<double> mu_;
  std::vector<double> face_, cprime_, denom_;
  bool symmetric_ = true;
  mutable bool mixed_checked_ = false;
  mutable bool mixed_ = false;
};

}  // namespace

BLSolution solve_enlarged(const EnlargedProblem& problem, double a, const EnlargedOptions& opts) {
  const double lam = std::hypot(problem.lambda[0], problem.lambda[1]);
  if (!(lam > 0.0)) throw DomainError("enlarged solve needs a nonzero tangential frequency");
  if (opts.modes < 1) throw DomainError("enlarged solve needs at least one Fourier mode per axis");
  const int Mt = opts.modes, N = problem.components;
  double kmin = std::numeric_limits<double>::infinity(), kmax = 0.0;
  for (int m1 = -Mt; m1 <= Mt; ++m1)
    for (int m2 = -Mt; m2 <= Mt; ++m2) {
      const int m[2] = {m1, m2};
      const double k = mode_rate(problem.lambda, m);
      if (k > 1e-12 * lam) {
        kmin = std::min(kmin, k);
        kmax = std::max(kmax, k);
      }
    }
  double L = opts.height > 0.0 ? opts.height : 10.0 / kmin;
  const double dt_target = opts.dt > 0.0 ? opts.dt : 0.05 / kmax;

  BLSolution sol;
  for (int doubling = 0;; ++doubling) {
    int rows = static_cast<int>(std::lround(L / dt_target)) + 1;
    rows = std::clamp(rows, 3, std::max(3, opts.max_rows + 1));
    const double dt = L / (rows - 1);
    EnlargedOperator op(problem, Mt, rows, a, dt);
    const int nth = op.theta_nodes(), Mg = op.grid_modes();
    const std::size_t n = op.size();

    std::vector<double> vb(n, 0.0), Kvb(n), b(n), x(n, 0.0);
    std::vector<double> theta(2);
    for (int q = 0; q < nth; ++q) {
      theta[0] = static_cast<double>(q % Mg) / Mg;
      theta[1] = static_cast<double>(q / Mg) / Mg;
      problem.P(theta, std::span<double>(vb.data() + static_cast<std::size_t>(q) * N, N));
    }
    op.apply_unknowns(vb, Kvb);
    for (std::size_t k = 0; k < n; ++k) b[k] = -Kvb[k];
    auto A = [&](std::span<const double> in, std::span<double> out) { op.apply_unknowns(in, out); };
    auto M = [&](std::span<const double> in, std::span<double> out) { op.precondition(in, out); };
    const SolveStats st = op.symmetric() ? pcg(A, M, b, x, opts.solver) : bicgstab(A, M, b, x, opts.solver);
    require_converged(st, "enlarged boundary-layer solve");
    for (std::size_t k = 0; k < n; ++k) x[k] += vb[k];

    sol = BLSolution{};
    sol.path = "quasiperiodic";
    sol.components = N;
    sol.normal = problem.normal;
    sol.lambda = problem.lambda;
    sol.grid_modes = Mg;
    sol.a = a;
    sol.height = L;
    sol.row_nodes = nth;
    sol.rows = rows;
    sol.row_spacing = 1.0 / Mg;
    sol.dz = dt;
    sol.stats = st;
    sol.doublings = doubling;
    std::vector<double> row_e, face_e;
    op.energies(x, row_e, face_e);
    sol.V = std::move(x);
    detail::finish_decay(sol, row_e, face_e);
    if (!opts.auto_height || sol.decay_ratio < kDecayTarget || doubling >= opts.max_doublings) break;
    L *= 2.0;
  }
  sol.U_inf = detail::top_mean(sol);
  return sol;
}

}  // namespace homobl
