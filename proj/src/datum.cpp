#include "homobl/datum.hpp"

#include <fmt/format.h>

#include "homobl/error.hpp"

namespace homobl {

void OscillatingTerm::evaluate_profile(std::span<const double> y, std::span<double> out) const {
  if (table) {
    table->interpolate(y, out);
    return;
  }
  std::vector<double> yr(y.begin(), y.end());
  for (double& v : yr) v = wrap_unit(v);
  profile(yr, out);
}

bool BoundaryChart::contains(std::span<const double> x, double tol) const {
  for (std::size_t a = 0; a < lower.size(); ++a) {
    if (x[a] < lower[a] - tol || x[a] > upper[a] + tol) return false;
  }
  return true;
}

DirichletDatum::DirichletDatum(int dim, int components, BoundaryChart chart, PointFn slow,
                               std::vector<OscillatingTerm> terms)
    : dim_(dim), components_(components), chart_(std::move(chart)), slow_(std::move(slow)),
      terms_(std::move(terms)) {
  if (static_cast<int>(chart_.lower.size()) != dim || static_cast<int>(chart_.upper.size()) != dim)
    throw ShapeError("boundary chart dimension does not match the datum");
  for (const auto& t : terms_) {
    if (!t.profile && !t.table) throw Error("oscillating term without a profile");
    if (t.table && t.table->components() != components)
      throw ShapeError("tabulated profile has the wrong number of components");
  }
}

void DirichletDatum::slow(std::span<const double> x, std::span<double> out) const {
  if (slow_) {
    slow_(x, out);
  } else {
    for (int i = 0; i < components_; ++i) out[i] = 0.0;
  }
}

void DirichletDatum::evaluate(std::span<const double> x, std::span<double> y,
                              std::span<double> out) const {
  if (!chart_.contains(x)) {
    throw DomainError(fmt::format("datum evaluated at x = ({}) outside its boundary chart",
                                  fmt::join(x, ", ")));
  }
  for (double& v : y) v = wrap_unit(v);
  slow(x, out);
  std::vector<double> p(components_);
  for (const auto& t : terms_) {
    const double w = t.weight ? t.weight(x) : 1.0;
    if (w == 0.0) continue;
    t.evaluate_profile(y, p);
    for (int i = 0; i < components_; ++i) out[i] += w * p[i];
  }
}

std::vector<double> DirichletDatum::evaluate(std::span<const double> x,
                                             std::span<const double> y) const {
  std::vector<double> yy(y.begin(), y.end()), out(components_);
  evaluate(x, yy, out);
  return out;
}

DirichletDatum DirichletDatum::tabulated(int resolution) const {
  std::vector<OscillatingTerm> terms = terms_;
  TorusGrid grid(dim_, resolution);
  std::vector<double> y(dim_);
  for (auto& t : terms) {
    TorusField table(grid, components_);
    for (std::size_t n = 0; n < grid.size(); ++n) {
      grid.coordinates(n, y);
      t.evaluate_profile(y, table.at(n));
    }
    t.table = std::move(table);
  }
  return DirichletDatum(dim_, components_, chart_, slow_, std::move(terms));
}

}  // namespace homobl
