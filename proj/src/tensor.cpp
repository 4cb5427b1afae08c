#include "homobl/tensor.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <fmt/format.h>
#include <limits>
#include <numbers>
#include <ostream>

#include "homobl/error.hpp"
#include "homobl/rng.hpp"

namespace homobl {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Largest |f(y+e_a) - f(y)| over the grid nodes.
double periodicity_defect(const std::function<double(std::span<const double>)>& f, int dim,
                          int resolution) {
  TorusGrid grid(dim, resolution);
  std::vector<double> y(dim), ys(dim);
  double worst = 0.0;
  for (std::size_t n = 0; n < grid.size(); ++n) {
    grid.coordinates(n, y);
    const double v = f(y);
    for (int a = 0; a < dim; ++a) {
      ys = y;
      ys[a] += 1.0;
      worst = std::max(worst, std::abs(f(ys) - v));
    }
  }
  return worst;
}

}  // namespace

double TrigPolynomial::operator()(std::span<const double> y) const {
  double s = constant;
  for (const auto& t : terms) {
    double phase = 0.0;
    for (std::size_t a = 0; a < t.wave.size(); ++a) phase += t.wave[a] * y[a];
    phase *= kTwoPi;
    if (t.cos_coef != 0.0) s += t.cos_coef * std::cos(phase);
    if (t.sin_coef != 0.0) s += t.sin_coef * std::sin(phase);
  }
  return s;
}

TrigPolynomial TrigPolynomial::fit(const std::function<double(std::span<const double>)>& f, int dim,
                                   int max_wave, double tol) {
  const int G = 2 * max_wave + 1;
  TorusGrid grid(dim, G);
  std::vector<double> samples(grid.size());
  std::vector<double> y(dim);
  double scale = 0.0;
  for (std::size_t n = 0; n < grid.size(); ++n) {
    grid.coordinates(n, y);
    samples[n] = f(y);
    scale = std::max(scale, std::abs(samples[n]));
  }
  TrigPolynomial p;
  std::vector<int> wave(dim), multi(dim);
  // Enumerate one representative of each +-k pair: first nonzero component positive.
  TorusGrid waves(dim, G);
  for (std::size_t w = 0; w < waves.size(); ++w) {
    waves.multi_index(w, multi);
    bool zero = true, representative = true;
    for (int a = dim - 1; a >= 0; --a) {
      wave[a] = multi[a] > max_wave ? multi[a] - G : multi[a];
    }
    for (int a = 0; a < dim; ++a) {
      if (wave[a] != 0) {
        zero = false;
        representative = wave[a] > 0;
        break;
      }
    }
    if (!representative) continue;
    std::complex<double> c(0.0, 0.0);
    for (std::size_t n = 0; n < grid.size(); ++n) {
      grid.coordinates(n, y);
      double phase = 0.0;
      for (int a = 0; a < dim; ++a) phase += wave[a] * y[a];
      c += samples[n] * std::polar(1.0, -kTwoPi * phase);
    }
    c /= static_cast<double>(grid.size());
    if (zero) {
      p.constant = c.real();
      continue;
    }
    const double cc = 2.0 * c.real(), ss = -2.0 * c.imag();
    const double cut = 1e-14 * std::max(scale, 1.0);
    if (std::abs(cc) > cut || std::abs(ss) > cut) {
      p.terms.push_back({wave, std::abs(cc) > cut ? cc : 0.0, std::abs(ss) > cut ? ss : 0.0});
    }
  }
  // Verify away from the fitting grid.
  CounterRng rng(0x7419);
  double worst = 0.0;
  for (int probe = 0; probe < 64; ++probe) {
    for (int a = 0; a < dim; ++a) y[a] = rng.uniform(static_cast<std::uint64_t>(probe * dim + a));
    worst = std::max(worst, std::abs(p(y) - f(y)));
  }
  if (worst > tol * std::max(scale, 1.0)) {
    throw Error(fmt::format("formula is not a trigonometric polynomial with |k| <= {} (defect {:.3e})",
                            max_wave, worst));
  }
  return p;
}

TensorShape shape_of(const TensorSpec& spec) {
  return std::visit(
      [](const auto& s) -> TensorShape {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, ConstantTensor> || std::is_same_v<T, TrigonometricTensor>) {
          return s.shape;
        } else {
          return TensorShape{s.dim, s.components};
        }
      },
      spec);
}

void evaluate_spec(const TensorSpec& spec, std::span<const double> y, std::span<double> out) {
  const TensorShape shape = shape_of(spec);
  std::fill(out.begin(), out.begin() + shape.entries(), 0.0);
  auto fill_scalar = [&](double a) {
    for (int al = 0; al < shape.dim; ++al)
      for (int i = 0; i < shape.components; ++i) out[shape.index(al, al, i, i)] = a;
  };
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, ConstantTensor>) {
          std::copy(s.entries.begin(), s.entries.end(), out.begin());
        } else if constexpr (std::is_same_v<T, LayeredTensor>) {
          fill_scalar(s.profile(y[s.axis]));
        } else if constexpr (std::is_same_v<T, TrigonometricTensor>) {
          for (int k = 0; k < shape.entries(); ++k) out[k] = s.entries[k](y);
        } else {
          fill_scalar(s.coefficient(y));
        }
      },
      spec);
}

std::pair<double, double> form_eigen_bounds(const TensorShape& shape, std::span<const double> entries) {
  const int n = shape.dim * shape.components;
  Eigen::MatrixXd Q(n, n);
  for (int a = 0; a < shape.dim; ++a)
    for (int b = 0; b < shape.dim; ++b)
      for (int i = 0; i < shape.components; ++i)
        for (int j = 0; j < shape.components; ++j)
          Q(a * shape.components + i, b * shape.components + j) = entries[shape.index(a, b, i, j)];
  const Eigen::MatrixXd S = 0.5 * (Q + Q.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::EigenvaluesOnly);
  return {es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff()};
}

TensorField::TensorField(TensorSpec spec, TorusField values)
    : spec_(std::move(spec)), shape_(shape_of(spec_)), values_(std::move(values)) {
  if (values_.components() != shape_.entries()) throw ShapeError("tensor values have the wrong width");
  lambda_min_ = std::numeric_limits<double>::infinity();
  lambda_max_ = -std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < values_.grid().size(); ++n) {
    const auto [lo, hi] = form_eigen_bounds(shape_, values_.at(n));
    lambda_min_ = std::min(lambda_min_, lo);
    lambda_max_ = std::max(lambda_max_, hi);
  }
}

double TensorField::lambda() const {
  if (lambda_min_ <= 0.0) return lambda_min_;
  return std::min(lambda_min_, 1.0 / lambda_max_);
}

bool TensorField::symmetric(double tol) const {
  for (std::size_t n = 0; n < grid().size(); ++n) {
    const auto e = at(n);
    for (int a = 0; a < shape_.dim; ++a)
      for (int b = 0; b < shape_.dim; ++b)
        for (int i = 0; i < shape_.components; ++i)
          for (int j = 0; j < shape_.components; ++j) {
            const double u = e[shape_.index(a, b, i, j)], v = e[shape_.index(b, a, j, i)];
            if (std::abs(u - v) > tol * std::max({1.0, std::abs(u), std::abs(v)})) return false;
          }
  }
  return true;
}

TensorField TensorField::resample(int resolution) const { return build_tensor(spec_, resolution); }

TensorField build_tensor(const TensorSpec& spec, int resolution) {
  if (resolution < 4) {
    throw ResolutionError(fmt::format("tensor resolution M = {} is below the minimum of 4", resolution));
  }
  const TensorShape shape = shape_of(spec);
  if (shape.dim < 2) throw ShapeError("tensor dimension must be at least 2");
  if (shape.components < 1) throw ShapeError("system size must be at least 1");

  if (const auto* c = std::get_if<ConstantTensor>(&spec)) {
    if (static_cast<int>(c->entries.size()) != shape.entries())
      throw ShapeError(fmt::format("constant tensor needs {} entries, got {}", shape.entries(),
                                   c->entries.size()));
  }
  if (const auto* t = std::get_if<TrigonometricTensor>(&spec)) {
    if (static_cast<int>(t->entries.size()) != shape.entries())
      throw ShapeError("trigonometric tensor entry count does not match its shape");
  }
  if (const auto* l = std::get_if<LayeredTensor>(&spec)) {
    if (l->axis < 0 || l->axis >= l->dim) throw ShapeError("layering axis out of range");
    const double defect = std::abs(l->profile(1.0) - l->profile(0.0)) +
                          std::abs(l->profile(0.37 + 1.0) - l->profile(0.37));
    if (defect > 1e-9) throw Error("layered profile is not 1-periodic");
  }
  if (const auto* s = std::get_if<ScalarTensor>(&spec)) {
    if (periodicity_defect(s->coefficient, s->dim, std::min(resolution, 16)) > 1e-9)
      throw Error("scalar coefficient is not 1-periodic");
  }

  TorusGrid grid(shape.dim, resolution);
  TorusField values(grid, shape.entries());
  std::vector<double> y(shape.dim);
  const bool scalar_profile =
      std::holds_alternative<LayeredTensor>(spec) || std::holds_alternative<ScalarTensor>(spec);
  for (std::size_t n = 0; n < grid.size(); ++n) {
    grid.coordinates(n, y);
    auto out = values.at(n);
    evaluate_spec(spec, y, out);
    if (scalar_profile && !(out[0] > 0.0)) {
      throw EllipticityError(
          fmt::format("coefficient profile is not positive ({}) at node {}", out[0], n), y);
    }
  }
  return TensorField(spec, std::move(values));
}

EllipticityReport validate_ellipticity(const TensorField& A, double lambda, int samples,
                                       std::uint64_t seed) {
  if (samples < 1) throw Error("validate_ellipticity needs at least one sample");
  const TensorShape& shape = A.shape();
  const int n = shape.dim * shape.components;
  EllipticityReport rep;
  rep.lambda_claimed = lambda;
  rep.lambda_min = std::numeric_limits<double>::infinity();
  rep.lambda_max = -std::numeric_limits<double>::infinity();
  rep.sampled_min = std::numeric_limits<double>::infinity();
  rep.sampled_max = -std::numeric_limits<double>::infinity();
  CounterRng rng(seed);
  std::uint64_t counter = 0;
  std::vector<double> xi(n);
  for (std::size_t node = 0; node < A.grid().size(); ++node) {
    const auto e = A.at(node);
    const auto [lo, hi] = form_eigen_bounds(shape, e);
    if (lo < rep.lambda_min) {
      rep.lambda_min = lo;
      rep.worst_node = node;
    }
    rep.lambda_max = std::max(rep.lambda_max, hi);
    for (int s = 0; s < samples; ++s) {
      double norm2 = 0.0;
      for (int k = 0; k < n; ++k) {
        // Box-Muller normal draws give isotropic directions.
        const double u1 = std::max(rng.uniform(counter++), 1e-300);
        const double u2 = rng.uniform(counter++);
        xi[k] = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
        norm2 += xi[k] * xi[k];
      }
      double q = 0.0;
      for (int a = 0; a < shape.dim; ++a)
        for (int b = 0; b < shape.dim; ++b)
          for (int i = 0; i < shape.components; ++i)
            for (int j = 0; j < shape.components; ++j)
              q += e[shape.index(a, b, i, j)] * xi[b * shape.components + j] * xi[a * shape.components + i];
      q /= norm2;
      rep.sampled_min = std::min(rep.sampled_min, q);
      rep.sampled_max = std::max(rep.sampled_max, q);
    }
  }
  rep.worst_point.resize(shape.dim);
  A.grid().coordinates(rep.worst_node, rep.worst_point);
  rep.pass = rep.lambda_min >= lambda - kEllipticityTol;
  return rep;
}

void rotate_entries(const TensorShape& shape, const double rot[2][2], std::span<const double> in,
                    std::span<double> out) {
  const int N = shape.components;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
          double s = 0.0;
          for (int m = 0; m < 2; ++m)
            for (int v = 0; v < 2; ++v) s += rot[a][m] * in[shape.index(m, v, i, j)] * rot[b][v];
          out[shape.index(a, b, i, j)] = s;
        }
}

void write_tensor_csv(const TensorField& A, std::ostream& os) {
  const TensorShape& shape = A.shape();
  for (int a = 0; a < shape.dim; ++a) os << (a ? "," : "") << "y" << a + 1;
  for (int a = 0; a < shape.dim; ++a)
    for (int b = 0; b < shape.dim; ++b)
      for (int i = 0; i < shape.components; ++i)
        for (int j = 0; j < shape.components; ++j) os << fmt::format(",A{}{}_{}{}", a + 1, b + 1, i + 1, j + 1);
  os << '\n';
  std::vector<double> y(shape.dim);
  for (std::size_t n = 0; n < A.grid().size(); ++n) {
    A.grid().coordinates(n, y);
    for (int a = 0; a < shape.dim; ++a) os << (a ? "," : "") << fmt::format("{}", y[a]);
    for (double v : A.at(n)) os << fmt::format(",{}", v);
    os << '\n';
  }
}

}  // namespace homobl
