#include "homobl/config.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <set>
#include <sstream>

#include "homobl/error.hpp"
#include "homobl/expr.hpp"

namespace homobl {

namespace {

using nlohmann::json;

const std::vector<std::string> kX = {"x1", "x2"};
const std::vector<std::string> kY = {"y1", "y2"};

// Collects every problem instead of stopping at the first.
class Reader {
 public:
  std::vector<std::string> errors;
  json canonical = json::object();

  void error(const std::string& msg) { errors.push_back(msg); }

  const json* section(const json& root, const std::string& name, const std::set<std::string>& keys) {
    if (!root.contains(name)) return &empty_;
    const json& s = root.at(name);
    if (!s.is_object()) {
      error(fmt::format("[{}] must be an object", name));
      return &empty_;
    }
    for (const auto& [k, v] : s.items())
      if (!keys.count(k)) error(fmt::format("[{}] unknown key '{}'", name, k));
    return &s;
  }

  std::optional<double> number(const json& v, const std::string& where) {
    try {
      if (v.is_number()) return v.get<double>();
      if (v.is_string()) return evaluate_constant(v.get<std::string>());
    } catch (const Error& e) {
      error(fmt::format("{}: {}", where, e.what()));
      return std::nullopt;
    }
    error(fmt::format("{}: expected a number", where));
    return std::nullopt;
  }

  double number_or(const json& sec, const std::string& key, double def, const std::string& where) {
    if (!sec.contains(key) || sec.at(key).is_null()) return def;
    return number(sec.at(key), where + "." + key).value_or(def);
  }

  std::optional<double> optional_number(const json& sec, const std::string& key, const std::string& where) {
    if (!sec.contains(key) || sec.at(key).is_null()) return std::nullopt;
    return number(sec.at(key), where + "." + key);
  }

  long long integer_or(const json& sec, const std::string& key, long long def, const std::string& where) {
    if (!sec.contains(key)) return def;
    const json& v = sec.at(key);
    if (v.is_number_integer() || v.is_number_unsigned()) return v.get<long long>();
    if (v.is_number_float() && std::floor(v.get<double>()) == v.get<double>())
      return static_cast<long long>(v.get<double>());
    error(fmt::format("{}.{}: expected an integer", where, key));
    return def;
  }

  bool bool_or(const json& sec, const std::string& key, bool def, const std::string& where) {
    if (!sec.contains(key)) return def;
    if (!sec.at(key).is_boolean()) {
      error(fmt::format("{}.{}: expected true or false", where, key));
      return def;
    }
    return sec.at(key).get<bool>();
  }

  std::string string_or(const json& sec, const std::string& key, const std::string& def, const std::string& where) {
    if (!sec.contains(key)) return def;
    if (!sec.at(key).is_string()) {
      error(fmt::format("{}.{}: expected a string", where, key));
      return def;
    }
    return sec.at(key).get<std::string>();
  }

  std::optional<Expression> expression(const json& v, const std::vector<std::string>& vars, const std::string& where) {
    std::string src;
    if (v.is_number()) {
      src = fmt::format("{}", v.get<double>());
    } else if (v.is_string()) {
      src = v.get<std::string>();
    } else {
      error(fmt::format("{}: expected a formula string", where));
      return std::nullopt;
    }
    try {
      return Expression(src, vars);
    } catch (const Error& e) {
      error(fmt::format("{}: {}", where, e.what()));
      return std::nullopt;
    }
  }

  std::vector<double> numbers(const json& v, const std::string& where) {
    std::vector<double> out;
    if (!v.is_array()) {
      error(fmt::format("{}: expected a list", where));
      return out;
    }
    for (std::size_t k = 0; k < v.size(); ++k)
      if (auto x = number(v[k], fmt::format("{}[{}]", where, k))) out.push_back(*x);
    return out;
  }

  std::optional<std::array<double, 2>> unit_vector(const json& sec, const std::string& key, const std::string& where) {
    if (!sec.contains(key)) return std::nullopt;
    const auto v = numbers(sec.at(key), where + "." + key);
    if (v.size() != 2) {
      error(fmt::format("{}.{}: expected two entries", where, key));
      return std::nullopt;
    }
    const double n = std::hypot(v[0], v[1]);
    if (!(n > 0.0) || !std::isfinite(n)) {
      error(fmt::format("{}.{}: zero vector", where, key));
      return std::nullopt;
    }
    return std::array<double, 2>{v[0] / n, v[1] / n};
  }

 private:
  const json empty_ = json::object();
};

double eval1(const Expression& e, double t) { return e.evaluate({t}); }

void read_tensor(Reader& r, const json& root, ExperimentConfig& cfg) {
  json& c = r.canonical["tensor"];
  if (!root.contains("tensor")) {
    r.error("[tensor] section is required");
    return;
  }
  const json* s = r.section(root, "tensor", {"kind", "profile", "axis", "matrix", "coefficient", "max_wave"});
  const std::string kind = r.string_or(*s, "kind", "", "tensor");
  c["kind"] = kind;
  if (kind == "constant") {
    if (!s->contains("matrix") || !s->at("matrix").is_array() || s->at("matrix").size() != 2) {
      r.error("tensor.matrix: expected a 2 x 2 list");
      return;
    }
    ConstantTensor t{{2, 1}, std::vector<double>(4, 0.0)};
    for (int a = 0; a < 2; ++a) {
      const auto row = r.numbers(s->at("matrix")[a], fmt::format("tensor.matrix[{}]", a));
      if (row.size() != 2) {
        r.error(fmt::format("tensor.matrix[{}]: expected two entries", a));
        return;
      }
      t.entries[a * 2] = row[0];
      t.entries[a * 2 + 1] = row[1];
    }
    c["matrix"] = {{t.entries[0], t.entries[1]}, {t.entries[2], t.entries[3]}};
    cfg.tensor = t;
  } else if (kind == "layered") {
    const int axis = static_cast<int>(r.integer_or(*s, "axis", 1, "tensor"));
    if (axis < 1 || axis > 2) r.error("tensor.axis must be 1 or 2");
    c["axis"] = axis;
    if (!s->contains("profile")) {
      r.error("tensor.profile is required for a layered tensor");
      return;
    }
    auto e = r.expression(s->at("profile"), {"t"}, "tensor.profile");
    if (!e) return;
    c["profile"] = e->source();
    LayeredTensor t;
    t.profile = [e = *e](double y) { return eval1(e, y); };
    t.axis = std::clamp(axis, 1, 2) - 1;
    cfg.tensor = t;
  } else if (kind == "scalar") {
    if (!s->contains("coefficient")) {
      r.error("tensor.coefficient is required for a scalar tensor");
      return;
    }
    auto e = r.expression(s->at("coefficient"), kY, "tensor.coefficient");
    if (!e) return;
    c["coefficient"] = e->source();
    ScalarTensor t;
    t.coefficient = [e = *e](std::span<const double> y) { return e(y); };
    cfg.tensor = t;
  } else if (kind == "trigonometric") {
    const int max_wave = static_cast<int>(r.integer_or(*s, "max_wave", 8, "tensor"));
    c["max_wave"] = max_wave;
    if (!s->contains("matrix") || !s->at("matrix").is_array() || s->at("matrix").size() != 2) {
      r.error("tensor.matrix: expected a 2 x 2 list of formulas");
      return;
    }
    TrigonometricTensor t;
    t.shape = {2, 1};
    c["matrix"] = json::array();
    for (int a = 0; a < 2; ++a) {
      const json& row = s->at("matrix")[a];
      json crow = json::array();
      if (!row.is_array() || row.size() != 2) {
        r.error(fmt::format("tensor.matrix[{}]: expected two entries", a));
        return;
      }
      for (int b = 0; b < 2; ++b) {
        auto e = r.expression(row[b], kY, fmt::format("tensor.matrix[{}][{}]", a, b));
        if (!e) return;
        crow.push_back(e->source());
        try {
          t.entries.push_back(TrigPolynomial::fit([&](std::span<const double> y) { return (*e)(y); }, 2, max_wave));
        } catch (const Error& err) {
          r.error(fmt::format("tensor.matrix[{}][{}]: {}", a, b, err.what()));
          return;
        }
      }
      c["matrix"].push_back(crow);
    }
    cfg.tensor = t;
  } else {
    r.error(fmt::format("tensor.kind '{}' is not one of constant, layered, scalar, trigonometric", kind));
  }
}

void read_domain(Reader& r, const json& root, ExperimentConfig& cfg) {
  json& c = r.canonical["domain"];
  const json* s = r.section(root, "domain", {"kind", "bounds", "vertices", "center", "radius", "sides", "alpha_geom"});
  const std::string kind = r.string_or(*s, "kind", "strip", "domain");
  c["kind"] = kind;
  DomainSpec& d = cfg.domain;
  if (kind == "strip") d.kind = DomainKind::Strip;
  else if (kind == "rectangle") d.kind = DomainKind::Rectangle;
  else if (kind == "polygon") d.kind = DomainKind::Polygon;
  else if (kind == "disk") d.kind = DomainKind::Disk;
  else r.error(fmt::format("domain.kind '{}' is not one of strip, rectangle, polygon, disk", kind));
  if (s->contains("bounds")) {
    const auto b = r.numbers(s->at("bounds"), "domain.bounds");
    if (b.size() != 4) r.error("domain.bounds: expected [x_lo, x_hi, y_lo, y_hi]");
    else std::copy(b.begin(), b.end(), d.bounds.begin());
  }
  if (d.kind == DomainKind::Strip || d.kind == DomainKind::Rectangle) c["bounds"] = d.bounds;
  if (d.kind == DomainKind::Polygon) {
    if (!s->contains("vertices") || !s->at("vertices").is_array()) {
      r.error("domain.vertices is required for a polygon");
    } else {
      for (std::size_t k = 0; k < s->at("vertices").size(); ++k) {
        const auto v = r.numbers(s->at("vertices")[k], fmt::format("domain.vertices[{}]", k));
        if (v.size() == 2) d.vertices.push_back({v[0], v[1]});
        else r.error(fmt::format("domain.vertices[{}]: expected two entries", k));
      }
    }
    c["vertices"] = d.vertices;
  }
  if (d.kind == DomainKind::Disk) {
    if (s->contains("center")) {
      const auto v = r.numbers(s->at("center"), "domain.center");
      if (v.size() == 2) d.center = {v[0], v[1]};
      else r.error("domain.center: expected two entries");
    }
    d.radius = r.number_or(*s, "radius", d.radius, "domain");
    d.sides = static_cast<int>(r.integer_or(*s, "sides", 0, "domain"));
    d.alpha_geom = r.number_or(*s, "alpha_geom", d.alpha_geom, "domain");
    if (d.sides != 0 && d.sides < 3) r.error("domain.sides must be 0 (automatic) or at least 3");
    if (!(d.alpha_geom > 0.0 && d.alpha_geom < 1.0)) r.error("domain.alpha_geom must lie in (0, 1)");
    c["center"] = d.center;
    c["radius"] = d.radius;
    c["sides"] = d.sides;
    c["alpha_geom"] = d.alpha_geom;
  }
}

void read_datum(Reader& r, const json& root, ExperimentConfig& cfg, bool domain_ok) {
  json& c = r.canonical["datum"];
  const json* s = r.section(root, "datum", {"slow", "oscillating"});
  auto slow = r.expression(s->contains("slow") ? s->at("slow") : json("0"), kX, "datum.slow");
  std::vector<OscillatingTerm> terms;
  c["oscillating"] = json::array();
  if (s->contains("oscillating")) {
    const json& list = s->at("oscillating");
    if (!list.is_array()) {
      r.error("datum.oscillating: expected a list of {weight, profile}");
    } else {
      for (std::size_t k = 0; k < list.size(); ++k) {
        const std::string where = fmt::format("datum.oscillating[{}]", k);
        const json& t = list[k];
        if (!t.is_object() || !t.contains("profile")) {
          r.error(where + ": expected {\"weight\": ..., \"profile\": ...}");
          continue;
        }
        for (const auto& [key, v] : t.items())
          if (key != "weight" && key != "profile") r.error(fmt::format("{} unknown key '{}'", where, key));
        auto w = r.expression(t.contains("weight") ? t.at("weight") : json("1"), kX, where + ".weight");
        auto p = r.expression(t.at("profile"), kY, where + ".profile");
        if (!w || !p) continue;
        OscillatingTerm term;
        if (!(w->is_constant() && w->evaluate({0.0, 0.0}) == 1.0))
          term.weight = [w = *w](std::span<const double> x) { return w(x); };
        term.profile = [p = *p](std::span<const double> y, std::span<double> out) { out[0] = p(y); };
        terms.push_back(std::move(term));
        c["oscillating"].push_back({{"weight", w->source()}, {"profile", p->source()}});
      }
    }
  }
  if (!slow) return;
  c["slow"] = slow->source();
  if (!domain_ok) return;
  try {
    const BoundaryChart dc = Domain(cfg.domain, 1.0).chart();
    BoundaryChart chart{{dc.lower[0] - 1e-9, dc.lower[1] - 1e-9}, {dc.upper[0] + 1e-9, dc.upper[1] + 1e-9}};
    PointFn g = [e = *slow](std::span<const double> x, std::span<double> out) { out[0] = e(x); };
    cfg.datum = DirichletDatum(2, 1, chart, g, std::move(terms));
  } catch (const Error& e) {
    r.error(fmt::format("domain: {}", e.what()));
  }
}

void read_source(Reader& r, const json& root, ExperimentConfig& cfg) {
  if (!root.contains("source")) {
    r.canonical["source"] = "0";
    return;
  }
  auto e = r.expression(root.at("source"), kX, "source");
  if (!e) return;
  r.canonical["source"] = e->source();
  if (e->is_constant() && e->evaluate({0.0, 0.0}) == 0.0) return;
  cfg.source = [e = *e](std::span<const double> x, std::span<double> out) { out[0] = e(x); };
}

void read_sections(Reader& r, const json& root, ExperimentConfig& cfg) {
  static const std::set<std::string> top = {"tensor", "cell",  "ellipticity", "datum",  "source", "domain",
                                            "sweep",  "bl",    "dioph",       "solver", "run"};
  for (const auto& [k, v] : root.items())
    if (!top.count(k)) r.error(fmt::format("unknown section '{}'", k));

  read_tensor(r, root, cfg);

  {
    const json* s = r.section(root, "cell", {"resolution", "second_order"});
    cfg.cell_resolution = static_cast<int>(r.integer_or(*s, "resolution", cfg.cell_resolution, "cell"));
    cfg.second_order = r.bool_or(*s, "second_order", cfg.second_order, "cell");
    if (cfg.cell_resolution < 4) r.error("cell.resolution must be at least 4");
    r.canonical["cell"] = {{"resolution", cfg.cell_resolution}, {"second_order", cfg.second_order}};
  }
  {
    const json* s = r.section(root, "ellipticity", {"lambda", "samples"});
    cfg.lambda = r.optional_number(*s, "lambda", "ellipticity");
    cfg.ellipticity_samples = static_cast<int>(r.integer_or(*s, "samples", cfg.ellipticity_samples, "ellipticity"));
    if (cfg.lambda && !(*cfg.lambda > 0.0)) r.error("λ must be positive");
    if (cfg.ellipticity_samples < 1) r.error("ellipticity.samples must be at least 1");
    r.canonical["ellipticity"] = {{"lambda", cfg.lambda ? json(*cfg.lambda) : json(nullptr)},
                                  {"samples", cfg.ellipticity_samples}};
  }

  const std::size_t before = r.errors.size();
  read_domain(r, root, cfg);
  read_datum(r, root, cfg, r.errors.size() == before);
  read_source(r, root, cfg);

  {
    const json* s = r.section(root, "sweep", {"eps", "order", "margin", "cells_per_eps"});
    if (s->contains("eps")) cfg.eps = r.numbers(s->at("eps"), "sweep.eps");
    cfg.order = static_cast<int>(r.integer_or(*s, "order", cfg.order, "sweep"));
    cfg.margin = r.number_or(*s, "margin", cfg.margin, "sweep");
    cfg.cells_per_eps = static_cast<int>(r.integer_or(*s, "cells_per_eps", cfg.cells_per_eps, "sweep"));
    if (cfg.eps.empty()) r.error("ε list is empty");
    bool decreasing = true;
    for (std::size_t k = 0; k < cfg.eps.size(); ++k) {
      const double e = cfg.eps[k];
      if (!(e > 0.0 && e <= 1.0)) r.error(fmt::format("ε = {} is outside (0, 1]", e));
      else if (std::abs(1.0 / e - std::round(1.0 / e)) > 1e-9 / e)
        r.error(fmt::format("ε = {} is not the reciprocal of an integer", e));
      if (k > 0 && !(e < cfg.eps[k - 1])) decreasing = false;
    }
    if (!decreasing) r.error("ε must be strictly decreasing");
    if (cfg.order < 0 || cfg.order > 1) r.error("sweep.order must be 0 or 1");
    if (!(cfg.margin > 0.0)) r.error("sweep.margin must be positive");
    if (cfg.cells_per_eps < kMinCellsPerEps)
      r.error(fmt::format("sweep.cells_per_eps must be at least {}", kMinCellsPerEps));
    r.canonical["sweep"] = {
        {"eps", cfg.eps}, {"order", cfg.order}, {"margin", cfg.margin}, {"cells_per_eps", cfg.cells_per_eps}};
  }
  {
    const json* s = r.section(root, "bl", {"normal", "offset", "offset_alt", "term", "resolution", "height", "modes",
                                           "max_rows", "auto_height"});
    if (auto n = r.unit_vector(*s, "normal", "bl")) cfg.bl_normal = *n;
    cfg.bl_offset = r.number_or(*s, "offset", cfg.bl_offset, "bl");
    cfg.bl_offset_alt = r.optional_number(*s, "offset_alt", "bl");
    cfg.bl_term = static_cast<int>(r.integer_or(*s, "term", 0, "bl"));
    auto& so = cfg.bl.strip;
    auto& eo = cfg.bl.enlarged;
    so.resolution = static_cast<int>(r.integer_or(*s, "resolution", so.resolution, "bl"));
    so.height = eo.height = r.number_or(*s, "height", 0.0, "bl");
    eo.modes = static_cast<int>(r.integer_or(*s, "modes", eo.modes, "bl"));
    eo.max_rows = static_cast<int>(r.integer_or(*s, "max_rows", eo.max_rows, "bl"));
    so.auto_height = eo.auto_height = r.bool_or(*s, "auto_height", true, "bl");
    if (so.resolution < 4) r.error("bl.resolution must be at least 4");
    if (eo.modes < 1) r.error("bl.modes must be at least 1");
    if (eo.max_rows < 16) r.error("bl.max_rows must be at least 16");
    if (so.height < 0.0) r.error("bl.height must be nonnegative");
    if (cfg.bl_term < 0) r.error("bl.term must be nonnegative");
    r.canonical["bl"] = {{"normal", cfg.bl_normal},
                         {"offset", cfg.bl_offset},
                         {"offset_alt", cfg.bl_offset_alt ? json(*cfg.bl_offset_alt) : json(nullptr)},
                         {"term", cfg.bl_term},
                         {"resolution", so.resolution},
                         {"height", so.height},
                         {"modes", eo.modes},
                         {"max_rows", eo.max_rows},
                         {"auto_height", so.auto_height}};
  }
  {
    const json* s = r.section(root, "dioph", {"normal", "kappa", "exponent", "truncation", "measure"});
    if (auto n = r.unit_vector(*s, "normal", "dioph")) cfg.dioph_normal = *n;
    cfg.kappa = r.number_or(*s, "kappa", cfg.kappa, "dioph");
    cfg.exponent = r.number_or(*s, "exponent", cfg.exponent, "dioph");
    cfg.truncation = static_cast<int>(r.integer_or(*s, "truncation", cfg.truncation, "dioph"));
    if (!(cfg.kappa > 0.0)) r.error("κ must be positive");
    if (!(cfg.exponent > 0.0)) r.error("dioph.exponent must be positive");
    if (cfg.truncation < 1) r.error("dioph.truncation must be at least 1");
    if (s->contains("measure")) {
      const json& m = s->at("measure");
      if (!m.is_object()) {
        r.error("dioph.measure must be an object");
      } else {
        for (const auto& [k, v] : m.items())
          if (k != "kappas" && k != "samples" && k != "truncation")
            r.error(fmt::format("[dioph.measure] unknown key '{}'", k));
        if (m.contains("kappas")) cfg.measure_kappas = r.numbers(m.at("kappas"), "dioph.measure.kappas");
        cfg.measure_samples = static_cast<int>(r.integer_or(m, "samples", cfg.measure_samples, "dioph.measure"));
        cfg.measure_truncation =
            static_cast<int>(r.integer_or(m, "truncation", cfg.measure_truncation, "dioph.measure"));
      }
    }
    for (double k : cfg.measure_kappas)
      if (!(k > 0.0)) r.error("κ must be positive");
    if (cfg.measure_kappas.empty()) r.error("dioph.measure.kappas is empty");
    if (cfg.measure_samples < 100) r.error("dioph.measure.samples must be at least 100");
    if (cfg.measure_truncation < 1) r.error("dioph.measure.truncation must be at least 1");
    r.canonical["dioph"] = {{"normal", cfg.dioph_normal},
                            {"kappa", cfg.kappa},
                            {"exponent", cfg.exponent},
                            {"truncation", cfg.truncation},
                            {"measure",
                             {{"kappas", cfg.measure_kappas},
                              {"samples", cfg.measure_samples},
                              {"truncation", cfg.measure_truncation}}}};
  }
  {
    const json* s = r.section(root, "solver", {"rtol", "max_iter"});
    cfg.solver.rtol = r.number_or(*s, "rtol", cfg.solver.rtol, "solver");
    cfg.solver.max_iter = static_cast<int>(r.integer_or(*s, "max_iter", cfg.solver.max_iter, "solver"));
    if (!(cfg.solver.rtol > 0.0 && cfg.solver.rtol < 1.0)) r.error("solver.rtol must lie in (0, 1)");
    if (cfg.solver.max_iter < 1) r.error("solver.max_iter must be at least 1");
    cfg.bl.strip.solver = cfg.bl.enlarged.solver = cfg.solver;
    r.canonical["solver"] = {{"rtol", cfg.solver.rtol}, {"max_iter", cfg.solver.max_iter}};
  }
  {
    const json* s = r.section(root, "run", {"out", "seed", "threads"});
    cfg.out = r.string_or(*s, "out", cfg.out, "run");
    const long long seed = r.integer_or(*s, "seed", 0, "run");
    if (seed < 0) r.error("run.seed must be nonnegative");
    cfg.seed = static_cast<std::uint64_t>(std::max(seed, 0LL));
    cfg.threads = static_cast<int>(r.integer_or(*s, "threads", cfg.threads, "run"));
    if (cfg.threads < 1) r.error("run.threads must be at least 1");
    // the output directory and thread count do not change results
    r.canonical["run"] = {{"seed", cfg.seed}};
  }
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text, const std::string& name) {
  json root;
  try {
    root = json::parse(text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError({fmt::format("{}: {}", name, e.what())});
  }
  if (!root.is_object()) throw ConfigError({fmt::format("{}: top level must be an object", name)});
  ExperimentConfig cfg;
  cfg.path = name;
  Reader r;
  read_sections(r, root, cfg);
  if (!r.errors.empty()) throw ConfigError(r.errors);
  cfg.canonical = std::move(r.canonical);
  return cfg;
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError({fmt::format("cannot read config {}", path.string())});
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_config_text(ss.str(), path.string());
}

std::string config_hash(const ExperimentConfig& cfg) {
  const std::string s = cfg.canonical.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

SweepSpec sweep_spec(const ExperimentConfig& cfg) {
  SweepSpec s;
  s.tensor = cfg.tensor;
  s.datum = cfg.datum;
  s.source = cfg.source;
  s.domain = cfg.domain;
  s.eps = cfg.eps;
  s.order = cfg.order;
  s.margin = cfg.margin;
  s.cells_per_eps = cfg.cells_per_eps;
  s.phi_star.kappa = cfg.kappa;
  s.phi_star.exponent = cfg.exponent;
  s.phi_star.truncation = cfg.truncation;
  s.phi_star.bl = cfg.bl;
  s.phi_star.threads = 1;
  s.solver = cfg.solver;
  s.threads = cfg.threads;
  return s;
}

}  // namespace homobl
