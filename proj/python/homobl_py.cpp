#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "homobl/bl.hpp"
#include "homobl/cell.hpp"
#include "homobl/config.hpp"
#include "homobl/dioph.hpp"
#include "homobl/error.hpp"
#include "homobl/io.hpp"
#include "homobl/run.hpp"

namespace py = pybind11;
using namespace homobl;

namespace {

py::object to_py(const Json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

// (M, M, C) array of a 2D torus field, index [i1, i2, c] at y = (i1, i2) / M.
py::array_t<double> field_array(const TorusField& f) {
  const int M = f.grid().resolution(), C = f.components();
  py::array_t<double> a({M, M, C});
  auto r = a.mutable_unchecked<3>();
  for (int j = 0; j < M; ++j)
    for (int i = 0; i < M; ++i) {
      const auto v = f.at(static_cast<std::size_t>(i) + static_cast<std::size_t>(j) * M);
      for (int c = 0; c < C; ++c) r(i, j, c) = v[c];
    }
  return a;
}

py::dict correctors(const std::string& config_text, std::optional<int> resolution) {
  const ExperimentConfig cfg = parse_config_text(config_text);
  CorrectorSet cs;
  {
    py::gil_scoped_release release;
    const TensorField A = build_tensor(cfg.tensor, resolution.value_or(cfg.cell_resolution));
    cs = compute_correctors(A, cfg.solver, cfg.second_order, cfg.threads);
  }
  py::dict out;
  const int d = cs.shape.dim;
  py::array_t<double> A0({d, d});
  auto r = A0.mutable_unchecked<2>();
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) r(a, b) = cs.A0[cs.shape.index(a, b, 0, 0)];
  out["A0"] = A0;
  py::list chi, ups;
  for (const auto& f : cs.chi) chi.append(field_array(f));
  for (const auto& f : cs.upsilon) ups.append(field_array(f));
  out["chi"] = chi;
  out["upsilon"] = ups;
  out["c"] = cs.c;
  out["report"] = to_py(to_json(cs));
  return out;
}

py::dict boundary_layer(const std::string& config_text) {
  const ExperimentConfig cfg = parse_config_text(config_text);
  const auto& terms = cfg.datum.terms();
  if (terms.empty()) throw ConfigError({"bl: the datum has no oscillating term"});
  const OscillatingTerm term = terms.at(cfg.bl_term);
  BLSolution sol;
  {
    py::gil_scoped_release release;
    const TensorField A = build_tensor(cfg.tensor, cfg.cell_resolution);
    sol = solve_boundary_layer(
        A, cfg.bl_normal, [term](std::span<const double> y, std::span<double> o) { term.evaluate_profile(y, o); },
        cfg.bl_offset, cfg.bl);
  }
  py::dict out;
  out["path"] = sol.path;
  out["U_inf"] = sol.U_inf;
  out["t"] = sol.t;
  out["F"] = sol.F;
  out["decay_class"] = to_string(sol.decay.kind);
  out["truncation_warning"] = sol.truncation_warning;
  out["report"] = to_py(to_json(sol));
  return out;
}

}  // namespace

PYBIND11_MODULE(_homobl, m) {
  m.doc() = "Periodic homogenization with oscillating Dirichlet data";
  m.attr("__version__") = HOMOBL_VERSION;

  // translators run newest first, so ConfigError is matched before its base
  const auto& base = py::register_exception<Error>(m, "HomoblError");
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());

  m.def("config_hash", [](const std::string& text) { return config_hash(parse_config_text(text)); },
        py::arg("config_text"));
  m.def("canonical_config", [](const std::string& text) { return to_py(parse_config_text(text).canonical); },
        py::arg("config_text"));

  m.def("correctors", &correctors, py::arg("config_text"), py::arg("resolution") = py::none(),
        "chi, A0, Upsilon and c for the config's tensor.");
  m.def("boundary_layer", &boundary_layer, py::arg("config_text"),
        "Boundary-layer solve for the config's [bl] normal and datum term.");

  m.def(
      "diophantine_constant",
      [](std::array<double, 2> n, int truncation, double exponent) {
        const double s = std::hypot(n[0], n[1]);
        n = {n[0] / s, n[1] / s};
        return to_py(to_json(diophantine_constant(n, truncation, exponent)));
      },
      py::arg("normal"), py::arg("truncation") = kDefaultTruncation, py::arg("exponent") = 2.0);
  m.def(
      "measure_complement",
      [](std::vector<double> kappas, int samples, int truncation, std::uint64_t seed) {
        std::vector<MeasureEstimate> est;
        {
          py::gil_scoped_release release;
          est = measure_complement(kappas, samples, truncation, seed);
        }
        py::list out;
        for (const auto& e : est) out.append(to_py(to_json(e)));
        return out;
      },
      py::arg("kappas"), py::arg("samples") = 1000, py::arg("truncation") = 50, py::arg("seed") = 0);
  m.def(
      "poisson_kernel_reference",
      [](const std::function<double(double)>& phi, double y2) { return poisson_kernel_reference(phi, y2); },
      py::arg("phi"), py::arg("y2"));

  m.def(
      "run",
      [](const std::string& subcommand, const std::string& config_path, const std::string& out, bool measure) {
        const ExperimentConfig cfg = parse_config(config_path);
        RunOptions opts;
        opts.out = out.empty() ? cfg.out : out;
        opts.measure = measure;
        RunManifest mf;
        {
          py::gil_scoped_release release;
          mf = run(subcommand, cfg, opts);
        }
        return to_py(to_json(mf));
      },
      py::arg("subcommand"), py::arg("config_path"), py::arg("out") = "", py::arg("measure") = false,
      "Runs a CLI pipeline and returns the manifest.");
}
