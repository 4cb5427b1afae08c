#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace homobl {

/// Uniform collocated grid on the unit torus [0,1)^d with M nodes per axis.
/// Node ordering is lexicographic with axis 0 varying fastest.
class TorusGrid {
 public:
  TorusGrid() = default;
  TorusGrid(int dim, int resolution);

  int dim() const { return dim_; }
  int resolution() const { return resolution_; }
  std::size_t size() const { return size_; }
  double spacing() const { return 1.0 / resolution_; }

  /// Index of a multi-index; components are reduced modulo M.
  std::size_t index(std::span<const int> multi) const;
  void multi_index(std::size_t node, std::span<int> multi) const;
  void coordinates(std::size_t node, std::span<double> y) const;
  std::size_t neighbor(std::size_t node, int axis, int shift) const;

  bool operator==(const TorusGrid& other) const {
    return dim_ == other.dim_ && resolution_ == other.resolution_;
  }

 private:
  int dim_ = 0;
  int resolution_ = 0;
  std::size_t size_ = 0;
  std::vector<std::size_t> strides_;
};

/// Vector-valued field tabulated on a torus grid.
class TorusField {
 public:
  TorusField() = default;
  TorusField(TorusGrid grid, int components);

  const TorusGrid& grid() const { return grid_; }
  int components() const { return components_; }

  std::span<double> at(std::size_t node) {
    return {data_.data() + node * components_, static_cast<std::size_t>(components_)};
  }
  std::span<const double> at(std::size_t node) const {
    return {data_.data() + node * components_, static_cast<std::size_t>(components_)};
  }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  /// Periodic multilinear interpolation at an arbitrary point of R^d.
  void interpolate(std::span<const double> y, std::span<double> out) const;
  std::vector<double> interpolate(std::span<const double> y) const;

  double mean(int component) const;
  void subtract_mean();

 private:
  TorusGrid grid_;
  int components_ = 0;
  std::vector<double> data_;
};

/// y reduced to [0,1) componentwise.
double wrap_unit(double y);

}  // namespace homobl
