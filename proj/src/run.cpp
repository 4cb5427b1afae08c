#include "homobl/run.hpp"

#include <chrono>
#include <cmath>
#include <fftw3.h>
#include <fmt/format.h>
#include <sstream>

#include "homobl/error.hpp"
#include "homobl/fit.hpp"

namespace homobl {

namespace {

class Stage {
 public:
  Stage(RunManifest& m, std::string name) : m_(m), name_(std::move(name)), t0_(std::chrono::steady_clock::now()) {}
  ~Stage() {
    m_.timings.push_back(
        {name_, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count()});
  }

 private:
  RunManifest& m_;
  std::string name_;
  std::chrono::steady_clock::time_point t0_;
};

// Sequential artifact writer; each file is registered in the manifest.
class Writer {
 public:
  Writer(std::filesystem::path dir, RunManifest& m) : dir_(std::move(dir)), m_(m) {}

  void text(const std::string& name, const std::string& body) {
    write_text(dir_ / name, body);
    m_.artifacts.push_back(name);
  }
  void json(const std::string& name, const Json& j) { text(name, j.dump(2) + "\n"); }
  void manifest() { write_json(dir_ / "manifest.json", to_json(m_)); }

 private:
  std::filesystem::path dir_;
  RunManifest& m_;
};

std::string fields_csv(const std::vector<TorusField>& fields, const std::string& name, int d) {
  if (fields.empty()) return "";
  const TorusGrid& g = fields.front().grid();
  const int C = fields.front().components();
  std::vector<std::string> head;
  for (int a = 0; a < g.dim(); ++a) head.push_back(fmt::format("y{}", a + 1));
  for (std::size_t f = 0; f < fields.size(); ++f) {
    // field index -> 1-based tensor index (one or two space indices)
    const std::string idx = fields.size() == static_cast<std::size_t>(d)
                                ? fmt::format("{}", f + 1)
                                : fmt::format("{}{}", f / d + 1, f % d + 1);
    for (int c = 0; c < C; ++c)
      head.push_back(C == 1 ? name + idx : fmt::format("{}{}_{}{}", name, idx, c / 2 + 1, c % 2 + 1));
  }
  CsvTable t(head);
  std::vector<double> row(head.size()), y(g.dim());
  for (std::size_t p = 0; p < g.size(); ++p) {
    g.coordinates(p, y);
    std::size_t k = 0;
    for (double v : y) row[k++] = v;
    for (const auto& f : fields)
      for (double v : f.at(p)) row[k++] = v;
    t.add_row(row);
  }
  return t.str();
}

PointFn term_profile(const ExperimentConfig& cfg) {
  const auto& terms = cfg.datum.terms();
  if (terms.empty()) throw ConfigError({"bl: the datum has no oscillating term"});
  if (cfg.bl_term >= static_cast<int>(terms.size()))
    throw ConfigError({fmt::format("bl.term = {} but the datum has {} oscillating terms", cfg.bl_term, terms.size())});
  const OscillatingTerm term = terms[cfg.bl_term];
  return [term](std::span<const double> y, std::span<double> out) { term.evaluate_profile(y, out); };
}

void run_validate(const ExperimentConfig& cfg, RunManifest& m, Writer& w) {
  std::optional<TensorField> A;
  EllipticityReport rep;
  {
    Stage s(m, "build_tensor");
    A.emplace(build_tensor(cfg.tensor, cfg.cell_resolution));
  }
  {
    Stage s(m, "ellipticity");
    rep = validate_ellipticity(*A, cfg.lambda.value_or(A->lambda()), cfg.ellipticity_samples, cfg.seed);
  }
  std::ostringstream os;
  write_tensor_csv(*A, os);
  w.text("tensor.csv", os.str());
  w.json("ellipticity.json", to_json(rep));
  m.summary = {{"lambda_min", rep.lambda_min}, {"lambda_max", rep.lambda_max}, {"pass", rep.pass}};
  if (!rep.pass)
    m.failures.push_back(fmt::format("ellipticity: smallest Rayleigh quotient {} is below the claimed {}",
                                     rep.lambda_min, rep.lambda_claimed));
}

void run_cell(const ExperimentConfig& cfg, RunManifest& m, Writer& w) {
  std::optional<CorrectorSet> cs;
  {
    Stage s(m, "correctors");
    const TensorField A = build_tensor(cfg.tensor, cfg.cell_resolution);
    cs.emplace(compute_correctors(A, cfg.solver, cfg.second_order, cfg.threads));
  }
  const Json j = to_json(*cs);
  w.json("correctors.json", j);
  w.text("chi.csv", fields_csv(cs->chi, "chi", cs->shape.dim));
  if (cs->has_second_order()) w.text("upsilon.csv", fields_csv(cs->upsilon, "ups", cs->shape.dim));
  m.summary = {{"A0", j["A0"]}};
}

void run_bl(const ExperimentConfig& cfg, RunManifest& m, Writer& w) {
  const PointFn phi = term_profile(cfg);
  std::optional<BLSolution> sol, alt;
  {
    Stage s(m, "boundary_layer");
    const TensorField A = build_tensor(cfg.tensor, cfg.cell_resolution);
    sol.emplace(solve_boundary_layer(A, cfg.bl_normal, phi, cfg.bl_offset, cfg.bl));
    if (cfg.bl_offset_alt) alt.emplace(solve_boundary_layer(A, cfg.bl_normal, phi, *cfg.bl_offset_alt, cfg.bl));
  }
  std::optional<TailReport> tail;
  try {
    tail = tail_constant(*sol, alt ? &*alt : nullptr);
  } catch (const UnreliableTailError& e) {
    m.failures.push_back(e.what());
  }
  Json j = to_json(*sol, tail);
  if (alt) j["alternative"] = to_json(*alt);
  w.json("bl.json", j);
  w.text("bl_decay.csv", decay_csv(*sol));
  PlotSpec plot;
  plot.title = fmt::format("boundary-layer energy, n = ({:.4f}, {:.4f})", sol->normal[0], sol->normal[1]);
  plot.xlabel = "t";
  plot.ylabel = "F(t)";
  plot.series.push_back({fmt::format("a = {}", sol->a), sol->t, sol->F});
  if (alt) plot.series.push_back({fmt::format("a = {}", alt->a), alt->t, alt->F});
  w.text("bl_decay.svg", render_svg(plot));
  m.summary = {{"path", sol->path}, {"U_inf", sol->U_inf}, {"decay_class", to_string(sol->decay.kind)}};
  if (tail && tail->sensitivity) m.summary["offset_sensitivity"] = *tail->sensitivity;
}

void run_dioph(const ExperimentConfig& cfg, const RunOptions& opts, RunManifest& m, Writer& w) {
  DiophantineCertificate cert;
  std::vector<MeasureEstimate> est;
  {
    Stage s(m, "certificate");
    cert = diophantine_constant(cfg.dioph_normal, cfg.truncation, cfg.exponent);
  }
  if (opts.measure) {
    Stage s(m, "measure");
    est = measure_complement(cfg.measure_kappas, cfg.measure_samples, cfg.measure_truncation, cfg.seed,
                             cfg.exponent, cfg.threads);
  }
  Json j = to_json(cert);
  j["kappa"] = cfg.kappa;
  j["in_A_kappa"] = cert.kappa_dot >= cfg.kappa;
  j["rational"] = rational_direction(cfg.dioph_normal).has_value();
  m.summary = {{"kappa_obs", cert.kappa_dot}, {"in_A_kappa", cert.kappa_dot >= cfg.kappa}};
  if (opts.measure) {
    Json mj = Json::array();
    std::vector<double> k, f;
    for (const auto& e : est) {
      mj.push_back(to_json(e));
      k.push_back(e.kappa);
      f.push_back(e.fraction);
    }
    j["measure"] = mj;
    if (k.size() >= 2) {
      const LinearFit fit = origin_fit(k, f);
      j["measure_fit"] = {{"slope", fit.slope}, {"r2", fit.r2}};
      m.summary["measure_slope"] = fit.slope;
      m.summary["measure_r2"] = fit.r2;
    }
  }
  w.json("certificate.json", j);
  if (opts.measure) w.text("measure.csv", measure_csv(est));
}

void run_sweep_cmd(const ExperimentConfig& cfg, RunManifest& m, Writer& w) {
  ConvergenceReport rep;
  {
    Stage s(m, "sweep");
    rep = run_sweep(sweep_spec(cfg));
  }
  w.json("report.json", to_json(rep));
  w.text("report.csv", report_csv(rep));
  PlotSpec plot;
  plot.title = "errors against eps";
  plot.xlabel = "eps";
  plot.ylabel = "error";
  plot.log_x = true;
  PlotSeries l2{"L2(domain)", {}, {}}, h1{"H1(interior)", {}, {}}, h1o{"H1(interior), order 1", {}, {}};
  for (const auto& r : rep.rows) {
    if (!r.failure.empty()) continue;
    l2.x.push_back(r.eps);
    l2.y.push_back(r.l2);
    h1.x.push_back(r.eps);
    h1.y.push_back(r.h1_interior);
    h1o.x.push_back(r.eps);
    h1o.y.push_back(r.h1_order1);
  }
  plot.series = {l2, h1};
  if (cfg.order >= 1) plot.series.push_back(h1o);
  w.text("errors.svg", render_svg(plot));
  m.summary = {{"below_noise", rep.below_noise}, {"l2_monotone", rep.l2_monotone}};
  if (rep.l2_rate) m.summary["l2_rate"] = rep.l2_rate->rate;
  if (rep.h1_order1_rate) m.summary["h1_order1_rate"] = rep.h1_order1_rate->rate;
  for (const auto& r : rep.rows)
    if (!r.failure.empty()) m.failures.push_back(fmt::format("eps = {}: {}", r.eps, r.failure));
}

}  // namespace

Json to_json(const RunManifest& m) {
  Json j;
  j["command"] = m.command;
  j["status"] = m.status;
  j["config"] = m.config_path;
  j["config_hash"] = m.config_hash;
  j["seed"] = m.seed;
  j["threads"] = m.threads;
  Json v = Json::object();
  for (const auto& [k, s] : m.versions) v[k] = s;
  j["versions"] = v;
  Json t = Json::array();
  for (const auto& s : m.timings) t.push_back({{"stage", s.stage}, {"seconds", s.seconds}});
  j["timings"] = t;
  j["artifacts"] = m.artifacts;
  j["failures"] = m.failures;
  j["summary"] = m.summary.is_null() ? Json::object() : m.summary;
  return j;
}

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> s = {"validate", "cell", "bl", "dioph", "sweep"};
  return s;
}

RunManifest run(const std::string& subcommand, const ExperimentConfig& cfg, const RunOptions& opts) {
  if (std::find(subcommands().begin(), subcommands().end(), subcommand) == subcommands().end())
    throw ConfigError({fmt::format("unknown subcommand '{}'", subcommand)});
  RunManifest m;
  m.command = subcommand;
  m.config_path = cfg.path;
  m.config_hash = config_hash(cfg);
  m.seed = cfg.seed;
  m.threads = cfg.threads;
  m.versions = {{"homobl", HOMOBL_VERSION},
                {"fmt", fmt::format("{}.{}.{}", FMT_VERSION / 10000, FMT_VERSION / 100 % 100, FMT_VERSION % 100)},
                {"nlohmann_json", fmt::format("{}.{}.{}", NLOHMANN_JSON_VERSION_MAJOR, NLOHMANN_JSON_VERSION_MINOR,
                                              NLOHMANN_JSON_VERSION_PATCH)},
                {"fftw", fftw_version},
                {"compiler", __VERSION__}};
  m.artifacts.push_back("manifest.json");

  std::error_code ec;
  std::filesystem::create_directories(opts.out, ec);
  if (ec) throw Error(fmt::format("cannot create output directory {}: {}", opts.out.string(), ec.message()));
  Writer w(opts.out, m);
  w.manifest();

  try {
    if (subcommand == "validate") run_validate(cfg, m, w);
    else if (subcommand == "cell") run_cell(cfg, m, w);
    else if (subcommand == "bl") run_bl(cfg, m, w);
    else if (subcommand == "dioph") run_dioph(cfg, opts, m, w);
    else run_sweep_cmd(cfg, m, w);
  } catch (const Error& e) {
    m.failures.push_back(fmt::format("{}: {}", subcommand, e.what()));
  }
  m.status = m.failures.empty() ? "ok" : "failed";
  w.manifest();
  return m;
}

}  // namespace homobl
