#include "homobl/io.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <limits>

#include "homobl/error.hpp"

namespace homobl {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{}", v);
}

void CsvTable::add_row(const std::vector<double>& row) {
  std::vector<std::string> s;
  s.reserve(row.size());
  for (double v : row) s.push_back(format_number(v));
  add_row(s);
}

void CsvTable::add_row(const std::vector<std::string>& row) {
  if (row.size() != header_.size()) throw ShapeError("csv row width differs from the header");
  rows_.push_back(row);
}

std::string CsvTable::str() const {
  std::string out;
  auto line = [&out](const std::vector<std::string>& r) {
    for (std::size_t k = 0; k < r.size(); ++k) {
      if (k) out += ',';
      out += r[k];
    }
    out += '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return out;
}

namespace {

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

Json number(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

Json vec(std::span<const double> v) {
  Json a = Json::array();
  for (double x : v) a.push_back(number(x));
  return a;
}

Json stats_json(const SolveStats& s) {
  return {{"iterations", s.iterations}, {"residual", number(s.residual)}, {"converged", s.converged}};
}

Json linear_json(const LinearFit& f) {
  return {{"slope", number(f.slope)}, {"intercept", number(f.intercept)}, {"r2", number(f.r2)}, {"points", f.points}};
}

Json rate_json(const std::optional<RateFit>& f) {
  if (!f) return nullptr;
  return {{"rate", number(f->rate)}, {"constant", number(f->constant)}, {"r2", number(f->r2)},
          {"residual", number(f->residual)}};
}

}  // namespace

std::string render_svg(const PlotSpec& plot) {
  constexpr double W = 640, H = 420, L = 70, R = 20, T = 36, B = 50;
  auto tx = [&](double v) { return plot.log_x ? std::log10(v) : v; };
  auto ty = [&](double v) { return plot.log_y ? std::log10(v) : v; };
  auto usable = [&](double x, double y) {
    return std::isfinite(x) && std::isfinite(y) && (!plot.log_x || x > 0) && (!plot.log_y || y > 0);
  };
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : plot.series)
    for (std::size_t k = 0; k < s.x.size() && k < s.y.size(); ++k) {
      if (!usable(s.x[k], s.y[k])) continue;
      x0 = std::min(x0, tx(s.x[k]));
      x1 = std::max(x1, tx(s.x[k]));
      y0 = std::min(y0, ty(s.y[k]));
      y1 = std::max(y1, ty(s.y[k]));
    }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 - x0 < 1e-12) x0 -= 0.5, x1 += 0.5;
  if (y1 - y0 < 1e-12) y0 -= 0.5, y1 += 0.5;
  auto px = [&](double v) { return L + (tx(v) - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double v) { return H - B - (ty(v) - y0) / (y1 - y0) * (H - T - B); };

  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
  std::string out = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n", W, H, W, H);
  out += fmt::format("<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"white\"/>\n", W, H);
  out += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n", L, T,
                     W - L - R, H - T - B);
  out += fmt::format("<text x=\"{}\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">{}</text>\n", W / 2,
                     escape_xml(plot.title));
  out += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"13\">{}</text>\n", (L + W - R) / 2,
                     H - 12, escape_xml(plot.xlabel));
  out += fmt::format(
      "<text x=\"16\" y=\"{}\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 {})\">{}</text>\n",
      (T + H - B) / 2, (T + H - B) / 2, escape_xml(plot.ylabel));
  for (int k = 0; k <= 4; ++k) {
    const double fx = x0 + (x1 - x0) * k / 4, fy = y0 + (y1 - y0) * k / 4;
    const double gx = L + (W - L - R) * k / 4, gy = H - B - (H - T - B) * k / 4;
    out += fmt::format("<text x=\"{:.1f}\" y=\"{}\" text-anchor=\"middle\" font-size=\"11\">{}</text>\n", gx,
                       H - B + 16, plot.log_x ? fmt::format("1e{:.2g}", fx) : fmt::format("{:.3g}", fx));
    out += fmt::format("<text x=\"{}\" y=\"{:.1f}\" text-anchor=\"end\" font-size=\"11\">{}</text>\n", L - 4,
                       gy + 4, plot.log_y ? fmt::format("1e{:.2g}", fy) : fmt::format("{:.3g}", fy));
  }
  for (std::size_t s = 0; s < plot.series.size(); ++s) {
    const auto& ser = plot.series[s];
    const char* color = colors[s % 5];
    std::string pts;
    for (std::size_t k = 0; k < ser.x.size() && k < ser.y.size(); ++k) {
      if (!usable(ser.x[k], ser.y[k])) continue;
      pts += fmt::format("{:.2f},{:.2f} ", px(ser.x[k]), py(ser.y[k]));
    }
    if (!pts.empty()) pts.pop_back();
    out += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n", color, pts);
    out += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"12\" fill=\"{}\">{}</text>\n", L + 10,
                       T + 16 + 15 * static_cast<double>(s), color, escape_xml(ser.label));
  }
  out += "</svg>\n";
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(fmt::format("cannot open {} for writing", path.string()));
  os << text;
  if (!os) throw Error(fmt::format("write to {} failed", path.string()));
}

void write_json(const std::filesystem::path& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

Json to_json(const EllipticityReport& r) {
  return {{"lambda_claimed", r.lambda_claimed}, {"lambda_min", number(r.lambda_min)},
          {"lambda_max", number(r.lambda_max)},  {"sampled_min", number(r.sampled_min)},
          {"sampled_max", number(r.sampled_max)}, {"pass", r.pass},
          {"worst_node", r.worst_node},          {"worst_point", vec(r.worst_point)}};
}

Json to_json(const CorrectorSet& cs) {
  const int d = cs.shape.dim, N = cs.shape.components;
  Json j;
  j["dim"] = d;
  j["components"] = N;
  j["resolution"] = cs.resolution;
  // A0 as a d x d array of N x N blocks
  Json A0 = Json::array();
  for (int a = 0; a < d; ++a) {
    Json row = Json::array();
    for (int b = 0; b < d; ++b) {
      Json blk = Json::array();
      for (int i = 0; i < N; ++i)
        for (int k = 0; k < N; ++k) blk.push_back(number(cs.A0[cs.shape.index(a, b, i, k)]));
      row.push_back(N == 1 ? blk[0] : blk);
    }
    A0.push_back(row);
  }
  j["A0"] = A0;
  if (cs.has_second_order()) {
    Json c = Json::array();
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        for (int g = 0; g < d; ++g) {
          Json blk = Json::array();
          for (int i = 0; i < N; ++i)
            for (int k = 0; k < N; ++k) blk.push_back(number(cs.c[cs.c_index(a, b, g, i, k)]));
          c.push_back({{"index", {a + 1, b + 1, g + 1}}, {"value", N == 1 ? blk[0] : blk}});
        }
    j["c"] = c;
    j["mean_b_defect"] = number(cs.mean_b_defect);
  }
  Json cst = Json::array();
  for (const auto& s : cs.chi_stats) cst.push_back(stats_json(s));
  j["chi_solves"] = cst;
  Json ust = Json::array();
  for (const auto& s : cs.upsilon_stats) ust.push_back(stats_json(s));
  if (cs.has_second_order()) j["upsilon_solves"] = ust;
  return j;
}

Json to_json(const BLSolution& sol, const std::optional<TailReport>& tail) {
  Json j;
  j["path"] = sol.path;
  j["n"] = {sol.normal[0], sol.normal[1]};
  j["a"] = sol.a;
  j["L"] = sol.height;
  j["U_inf"] = vec(sol.U_inf);
  j["decay_class"] = to_string(sol.decay.kind);
  j["fit"] = {{"rate", number(sol.decay.rate)},
              {"exponential", linear_json(sol.decay.exponential)},
              {"power", linear_json(sol.decay.power)}};
  j["decay_ratio"] = number(sol.decay_ratio);
  j["truncation_warning"] = sol.truncation_warning;
  j["doublings"] = sol.doublings;
  j["rows"] = sol.rows;
  j["row_nodes"] = sol.row_nodes;
  j["dz"] = sol.dz;
  if (sol.path == "quasiperiodic") {
    j["lambda"] = {sol.lambda[0], sol.lambda[1]};
    j["grid_modes"] = sol.grid_modes;
  }
  j["solve"] = stats_json(sol.stats);
  if (tail && tail->sensitivity) j["offset_sensitivity"] = number(*tail->sensitivity);
  return j;
}

Json to_json(const DiophantineCertificate& c) {
  return {{"normal", {c.normal[0], c.normal[1]}},
          {"exponent", c.exponent},
          {"truncation", c.truncation},
          {"kappa_dot", number(c.kappa_dot)},
          {"argmin_dot", {c.argmin_dot[0], c.argmin_dot[1]}},
          {"kappa_perp", number(c.kappa_perp)},
          {"argmin_perp", {c.argmin_perp[0], c.argmin_perp[1]}}};
}

Json to_json(const MeasureEstimate& m) {
  return {{"kappa", m.kappa},       {"samples", m.samples},   {"failures", m.failures},
          {"fraction", m.fraction}, {"ci_low", m.ci_low},     {"ci_high", m.ci_high}};
}

Json to_json(const SweepRow& r) {
  Json j = {{"eps", r.eps},
            {"h", r.h},
            {"l2", number(r.l2)},
            {"h1_interior", number(r.h1_interior)},
            {"l2_order1", number(r.l2_order1)},
            {"h1_order1", number(r.h1_order1)},
            {"u0_norm", number(r.u0_norm)},
            {"fine_iterations", r.fine_iterations},
            {"excluded_sides", r.excluded_sides}};
  j["failure"] = r.failure.empty() ? Json(nullptr) : Json(r.failure);
  return j;
}

Json to_json(const ConvergenceReport& rep) {
  Json j;
  Json rows = Json::array();
  for (const auto& r : rep.rows) rows.push_back(to_json(r));
  j["rows"] = rows;
  j["A0"] = vec(rep.A0);
  j["l2_rate"] = rate_json(rep.l2_rate);
  j["h1_rate"] = rate_json(rep.h1_rate);
  j["h1_order1_rate"] = rate_json(rep.h1_order1_rate);
  j["threshold"] = rep.threshold;
  j["l2_monotone"] = rep.l2_monotone;
  j["below_noise"] = rep.below_noise;
  j["failures"] = rep.failures;
  return j;
}

std::string field_csv(const TorusField& f, const std::string& prefix) {
  const TorusGrid& g = f.grid();
  std::vector<std::string> head;
  for (int a = 0; a < g.dim(); ++a) head.push_back(fmt::format("y{}", a + 1));
  for (int c = 0; c < f.components(); ++c) head.push_back(fmt::format("{}{}", prefix, c));
  CsvTable t(head);
  std::vector<double> row(head.size()), y(g.dim());
  for (std::size_t p = 0; p < g.size(); ++p) {
    g.coordinates(p, y);
    std::copy(y.begin(), y.end(), row.begin());
    const auto v = f.at(p);
    std::copy(v.begin(), v.end(), row.begin() + g.dim());
    t.add_row(row);
  }
  return t.str();
}

std::string decay_csv(const BLSolution& sol) {
  CsvTable t({"t", "F"});
  for (std::size_t k = 0; k < sol.t.size(); ++k) t.add_row(std::vector<double>{sol.t[k], sol.F[k]});
  return t.str();
}

std::string report_csv(const ConvergenceReport& rep) {
  CsvTable t({"eps", "h", "l2", "h1_interior", "l2_order1", "h1_order1", "l2_rate_running", "failure"});
  std::vector<double> eps, err;
  for (const auto& r : rep.rows) {
    std::string running = "";
    if (r.failure.empty()) {
      eps.push_back(r.eps);
      err.push_back(r.l2);
      if (eps.size() >= 2) {
        const std::size_t k = eps.size() - 1;
        running = format_number(std::log(err[k] / err[k - 1]) / std::log(eps[k] / eps[k - 1]));
      }
    }
    std::string fail = r.failure;
    std::replace(fail.begin(), fail.end(), ',', ';');
    std::replace(fail.begin(), fail.end(), '\n', ' ');
    t.add_row(std::vector<std::string>{format_number(r.eps), format_number(r.h), format_number(r.l2),
                                       format_number(r.h1_interior), format_number(r.l2_order1),
                                       format_number(r.h1_order1), running, fail});
  }
  return t.str();
}

std::string measure_csv(const std::vector<MeasureEstimate>& m) {
  CsvTable t({"kappa", "fraction", "ci_low", "ci_high"});
  for (const auto& e : m) t.add_row(std::vector<double>{e.kappa, e.fraction, e.ci_low, e.ci_high});
  return t.str();
}

}  // namespace homobl
