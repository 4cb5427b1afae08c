#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "homobl/config.hpp"

namespace homobl {

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

struct RunManifest {
  std::string command;
  std::string config_path;
  std::string config_hash;
  std::uint64_t seed = 0;
  int threads = 1;
  std::vector<std::pair<std::string, std::string>> versions;
  std::vector<StageTiming> timings;
  std::vector<std::string> artifacts;  ///< file names relative to the output directory
  std::vector<std::string> failures;   ///< empty on success
  std::string status = "running";      ///< "running", "ok" or "failed"
  Json summary;                        ///< headline numbers of the run

  bool ok() const { return status == "ok"; }
};

Json to_json(const RunManifest& m);

struct RunOptions {
  std::filesystem::path out;
  bool measure = false;  ///< dioph: also estimate |A_kappa^c|
};

/// Subcommands accepted by `run`.
const std::vector<std::string>& subcommands();

/// Runs one pipeline. manifest.json is written before any other file and
/// rewritten at the end; errors are recorded in the manifest rather than
/// thrown, except for an unknown subcommand or an unwritable directory.
RunManifest run(const std::string& subcommand, const ExperimentConfig& cfg, const RunOptions& opts);

}  // namespace homobl
