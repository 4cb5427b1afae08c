#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "homobl/config.hpp"
#include "homobl/error.hpp"
#include "homobl/run.hpp"

using namespace homobl;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = HOMOBL_CONFIG_DIR;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "homobl_test" / name;
  fs::remove_all(p);
  return p;
}

std::vector<std::string> config_errors(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ConfigError& e) {
    return e.messages();
  }
  return {};
}

bool has(const std::vector<std::string>& v, const std::string& s) {
  for (const auto& m : v)
    if (m.find(s) != std::string::npos) return true;
  return false;
}

const char* kMinimal = R"json({"tensor": {"kind": "constant", "matrix": [[1, 0], [0, 1]]}})json";

}  // namespace

TEST(Config, DefaultsFilled) {
  const ExperimentConfig c = parse_config_text(kMinimal);
  EXPECT_EQ(c.cell_resolution, 64);
  EXPECT_EQ(c.eps.size(), 3u);
  EXPECT_DOUBLE_EQ(c.eps[0], 0.125);
  EXPECT_EQ(c.cells_per_eps, 8);
  EXPECT_DOUBLE_EQ(c.kappa, 0.01);
  EXPECT_EQ(c.domain.kind, DomainKind::Strip);
  EXPECT_TRUE(c.canonical.contains("sweep"));
  EXPECT_TRUE(c.canonical.contains("dioph"));
}

TEST(Config, ShippedConfigsParse) {
  for (const auto& e : fs::directory_iterator(kConfigs)) {
    if (e.path().extension() != ".json") continue;
    EXPECT_NO_THROW(parse_config(e.path())) << e.path();
  }
}

TEST(Config, IncreasingEpsilonRejected) {
  const auto errs = config_errors(R"json({"tensor": {"kind": "constant", "matrix": [[1, 0], [0, 1]]},
                                      "sweep": {"eps": [0.125, 0.25]}})json");
  EXPECT_TRUE(has(errs, "ε must be strictly decreasing"));
}

TEST(Config, NonPositiveKappaRejected) {
  const auto errs = config_errors(R"json({"tensor": {"kind": "constant", "matrix": [[1, 0], [0, 1]]},
                                      "dioph": {"kappa": 0}})json");
  EXPECT_TRUE(has(errs, "κ must be positive"));
}

TEST(Config, AllErrorsCollected) {
  const auto errs = config_errors(R"json({"tensor": {"kind": "constant", "matrix": [[1, 0], [0, 1]]},
                                      "sweep": {"eps": [0.125, 0.25]},
                                      "dioph": {"kappa": -1},
                                      "bogus": 3})json");
  EXPECT_GE(errs.size(), 3u);
  EXPECT_TRUE(has(errs, "ε must be strictly decreasing"));
  EXPECT_TRUE(has(errs, "κ must be positive"));
  EXPECT_TRUE(has(errs, "bogus"));
}

TEST(Config, MissingTensorAndMalformedJson) {
  EXPECT_FALSE(config_errors("{}").empty());
  EXPECT_FALSE(config_errors("{\"tensor\": ").empty());
  EXPECT_THROW(parse_config(kConfigs / "does_not_exist.json"), ConfigError);
}

TEST(Config, HashIgnoresKeyOrderAndNumberSpelling) {
  const auto a = parse_config_text(R"json({"tensor": {"kind": "constant", "matrix": [[1, 0], [0, 1]]},
                                       "sweep": {"eps": ["1/8", "1/16"], "margin": 0.2}})json");
  const auto b = parse_config_text(R"json({"sweep": {"margin": 0.2, "eps": [0.125, 0.0625]},
                                       "tensor": {"matrix": [[1, 0], [0, 1]], "kind": "constant"}})json");
  EXPECT_EQ(config_hash(a), config_hash(b));
  EXPECT_EQ(config_hash(a).size(), 16u);
  const auto c = parse_config_text(R"json({"tensor": {"kind": "constant", "matrix": [[1, 0], [0, 1]]},
                                       "sweep": {"eps": ["1/8", "1/32"]}})json");
  EXPECT_NE(config_hash(a), config_hash(c));
}

TEST(Config, OutputDirectoryDoesNotChangeHash) {
  const auto a = parse_config_text(R"json({"tensor": {"kind": "constant", "matrix": [[1, 0], [0, 1]]},
                                       "run": {"out": "x"}})json");
  const auto b = parse_config_text(R"json({"tensor": {"kind": "constant", "matrix": [[1, 0], [0, 1]]},
                                       "run": {"out": "y", "threads": 3}})json");
  EXPECT_EQ(config_hash(a), config_hash(b));
}

TEST(Run, CellWritesHomogenizedTensor) {
  const auto cfg = parse_config(kConfigs / "layered.json");
  const fs::path out = scratch("cell");
  const RunManifest m = run("cell", cfg, {out});
  ASSERT_TRUE(m.ok()) << (m.failures.empty() ? "" : m.failures.front());
  const Json j = Json::parse(slurp(out / "correctors.json"));
  const auto& A0 = j["A0"];
  EXPECT_NEAR(A0[0][0].get<double>(), std::sqrt(3.0), 1e-6);
  EXPECT_NEAR(A0[1][1].get<double>(), 2.0, 1e-12);
  EXPECT_NEAR(A0[0][1].get<double>(), 0.0, 1e-12);
}

TEST(Run, ManifestListsArtifactsThatExist) {
  const auto cfg = parse_config(kConfigs / "layered.json");
  const fs::path out = scratch("manifest");
  const RunManifest m = run("validate", cfg, {out});
  ASSERT_TRUE(m.ok());
  const Json j = Json::parse(slurp(out / "manifest.json"));
  EXPECT_EQ(j["status"], "ok");
  EXPECT_EQ(j["config_hash"], config_hash(cfg));
  bool self = false;
  for (const auto& a : j["artifacts"]) {
    EXPECT_TRUE(fs::exists(out / a.get<std::string>())) << a;
    if (a == "manifest.json") self = true;
  }
  EXPECT_TRUE(self);
}

TEST(Run, FailedRunStillWritesManifest) {
  auto cfg = parse_config_text(R"json({"tensor": {"kind": "layered", "profile": "2 + cos(2*pi*t)"},
                                   "ellipticity": {"lambda": 1.5}})json");
  const fs::path out = scratch("failed");
  const RunManifest m = run("validate", cfg, {out});
  EXPECT_FALSE(m.ok());
  ASSERT_FALSE(m.failures.empty());
  const Json j = Json::parse(slurp(out / "manifest.json"));
  EXPECT_EQ(j["status"], "failed");
  EXPECT_FALSE(j["failures"].empty());
}

TEST(Run, UnknownSubcommandThrows) {
  const auto cfg = parse_config_text(kMinimal);
  EXPECT_THROW(run("nope", cfg, {scratch("nope")}), Error);
}

TEST(Run, DiophMeasureWritesCsv) {
  const auto cfg = parse_config(kConfigs / "golden_dioph.json");
  const fs::path out = scratch("dioph");
  const RunManifest m = run("dioph", cfg, {out, true});
  ASSERT_TRUE(m.ok());
  const std::string csv = slurp(out / "measure.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "kappa,fraction,ci_low,ci_high");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
  EXPECT_EQ(csv.find('\r'), std::string::npos);
  const Json c = Json::parse(slurp(out / "certificate.json"));
  EXPECT_TRUE(c["in_A_kappa"].get<bool>());
}

TEST(Run, ConstantSweepIsBelowNoiseFloor) {
  const auto cfg = parse_config(kConfigs / "constant_sweep.json");
  const fs::path out = scratch("constant");
  run("sweep", cfg, {out});
  const Json r = Json::parse(slurp(out / "report.json"));
  EXPECT_TRUE(r["below_noise"].get<bool>());
  const std::string csv = slurp(out / "report.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "eps,h,l2,h1_interior,l2_order1,h1_order1,l2_rate_running,failure");
}

TEST(Run, BitIdenticalArtifactsAcrossRuns) {
  const auto cfg = parse_config(kConfigs / "golden_dioph.json");
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  run("dioph", cfg, {a, true});
  run("dioph", cfg, {b, true});
  EXPECT_EQ(slurp(a / "measure.csv"), slurp(b / "measure.csv"));
  EXPECT_EQ(slurp(a / "certificate.json"), slurp(b / "certificate.json"));
  const auto cell = parse_config(kConfigs / "layered.json");
  run("cell", cell, {a});
  run("cell", cell, {b});
  EXPECT_EQ(slurp(a / "chi.csv"), slurp(b / "chi.csv"));
  EXPECT_EQ(slurp(a / "correctors.json"), slurp(b / "correctors.json"));
}
