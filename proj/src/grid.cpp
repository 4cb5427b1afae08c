#include "homobl/grid.hpp"

#include <cmath>

#include "homobl/error.hpp"

namespace homobl {

double wrap_unit(double y) {
  double r = y - std::floor(y);
  if (r >= 1.0) r -= 1.0;
  return r;
}

TorusGrid::TorusGrid(int dim, int resolution) : dim_(dim), resolution_(resolution) {
  if (dim < 1) throw ShapeError("torus dimension must be positive");
  if (resolution < 1) throw ResolutionError("torus resolution must be positive");
  strides_.resize(dim);
  size_ = 1;
  for (int a = 0; a < dim; ++a) {
    strides_[a] = size_;
    size_ *= static_cast<std::size_t>(resolution);
  }
}

std::size_t TorusGrid::index(std::span<const int> multi) const {
  std::size_t idx = 0;
  for (int a = 0; a < dim_; ++a) {
    int m = multi[a] % resolution_;
    if (m < 0) m += resolution_;
    idx += strides_[a] * static_cast<std::size_t>(m);
  }
  return idx;
}

void TorusGrid::multi_index(std::size_t node, std::span<int> multi) const {
  for (int a = 0; a < dim_; ++a) {
    multi[a] = static_cast<int>(node % resolution_);
    node /= resolution_;
  }
}

void TorusGrid::coordinates(std::size_t node, std::span<double> y) const {
  for (int a = 0; a < dim_; ++a) {
    y[a] = static_cast<double>(node % resolution_) / resolution_;
    node /= resolution_;
  }
}

std::size_t TorusGrid::neighbor(std::size_t node, int axis, int shift) const {
  const auto M = static_cast<std::size_t>(resolution_);
  const std::size_t stride = strides_[axis];
  const std::size_t i = (node / stride) % M;
  const std::size_t j = static_cast<std::size_t>(((static_cast<long long>(i) + shift) % resolution_ +
                                                  resolution_) % resolution_);
  return node - i * stride + j * stride;
}

TorusField::TorusField(TorusGrid grid, int components)
    : grid_(std::move(grid)), components_(components),
      data_(grid_.size() * static_cast<std::size_t>(components), 0.0) {}

void TorusField::interpolate(std::span<const double> y, std::span<double> out) const {
  const int d = grid_.dim();
  const int M = grid_.resolution();
  std::vector<int> base(d);
  std::vector<double> frac(d);
  for (int a = 0; a < d; ++a) {
    const double s = wrap_unit(y[a]) * M;
    int i = static_cast<int>(std::floor(s));
    double f = s - i;
    // snap to the node when the point sits on it up to rounding
    if (f < 1e-12) f = 0.0;
    if (f > 1.0 - 1e-12) {
      f = 0.0;
      i += 1;
    }
    base[a] = i;
    frac[a] = f;
  }
  for (int c = 0; c < components_; ++c) out[c] = 0.0;
  std::vector<int> corner(d);
  for (int mask = 0; mask < (1 << d); ++mask) {
    double w = 1.0;
    for (int a = 0; a < d; ++a) {
      const bool up = (mask >> a) & 1;
      w *= up ? frac[a] : 1.0 - frac[a];
      corner[a] = base[a] + (up ? 1 : 0);
    }
    if (w == 0.0) continue;
    const auto v = at(grid_.index(corner));
    for (int c = 0; c < components_; ++c) out[c] += w * v[c];
  }
}

std::vector<double> TorusField::interpolate(std::span<const double> y) const {
  std::vector<double> out(components_);
  interpolate(y, out);
  return out;
}

double TorusField::mean(int component) const {
  double s = 0.0;
  for (std::size_t n = 0; n < grid_.size(); ++n) s += data_[n * components_ + component];
  return s / static_cast<double>(grid_.size());
}

void TorusField::subtract_mean() {
  for (int c = 0; c < components_; ++c) {
    const double m = mean(c);
    for (std::size_t n = 0; n < grid_.size(); ++n) data_[n * components_ + c] -= m;
  }
}

}  // namespace homobl
