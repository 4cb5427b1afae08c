#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "homobl/bl.hpp"
#include "homobl/datum.hpp"
#include "homobl/domain.hpp"
#include "homobl/homog.hpp"
#include "homobl/io.hpp"
#include "homobl/linsolve.hpp"
#include "homobl/tensor.hpp"

namespace homobl {

/// Parsed experiment description. See README for the file format; every
/// field below has a default except the tensor.
struct ExperimentConfig {
  std::string path;

  TensorSpec tensor;
  int cell_resolution = 64;
  bool second_order = true;

  std::optional<double> lambda;  ///< claimed ellipticity; observed value when absent
  int ellipticity_samples = 64;

  DirichletDatum datum;
  PointFn source;  ///< empty for f = 0
  DomainSpec domain;

  std::vector<double> eps{1.0 / 8, 1.0 / 16, 1.0 / 32};
  int order = 0;
  double margin = 0.2;
  int cells_per_eps = kMinCellsPerEps;

  double kappa = 0.01;
  double exponent = 2.0;
  int truncation = kDefaultTruncation;

  std::array<double, 2> bl_normal{0.0, 1.0};
  double bl_offset = 0.0;
  std::optional<double> bl_offset_alt;
  int bl_term = 0;
  BLOptions bl;

  std::array<double, 2> dioph_normal{0.0, 1.0};
  std::vector<double> measure_kappas{0.02, 0.04, 0.08};
  int measure_samples = 1000;
  int measure_truncation = 50;

  SolveOptions solver;
  std::string out = "out";
  std::uint64_t seed = 0;
  int threads = 1;

  /// Normalized document with defaults filled in; keys sorted.
  nlohmann::json canonical;
};

/// Reads and validates a JSON config (comments allowed). Throws ConfigError
/// listing every problem found.
ExperimentConfig parse_config(const std::filesystem::path& path);
ExperimentConfig parse_config_text(const std::string& text, const std::string& name = "<string>");

/// 64-bit FNV-1a of the canonical document, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

SweepSpec sweep_spec(const ExperimentConfig& cfg);

}  // namespace homobl
