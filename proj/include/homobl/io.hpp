#pragma once

#include <filesystem>
#include "json.hpp"
#include <string>
#include <vector>

#include "homobl/bl.hpp"
#include "homobl/cell.hpp"
#include "homobl/dioph.hpp"
#include "homobl/homog.hpp"
#include "homobl/tensor.hpp"

namespace homobl {

using Json = nlohmann::ordered_json;

/// Shortest round-trip decimal form; "nan" / "inf" for non-finite values.
std::string format_number(double v);

/// CSV with a header row, comma separator and LF endings.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}
  void add_row(const std::vector<double>& row);
  void add_row(const std::vector<std::string>& row);
  std::string str() const;
  std::size_t rows() const { return rows_.size(); }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

struct PlotSeries {
  std::string label;
  std::vector<double> x, y;
};

struct PlotSpec {
  std::string title;
  std::string xlabel, ylabel;
  bool log_x = false;
  bool log_y = true;
  std::vector<PlotSeries> series;
};

/// Static SVG line plot. Points with non-positive values on a log axis are dropped.
std::string render_svg(const PlotSpec& plot);

void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const Json& j);

Json to_json(const EllipticityReport& r);
Json to_json(const CorrectorSet& cs);
Json to_json(const BLSolution& sol, const std::optional<TailReport>& tail = std::nullopt);
Json to_json(const DiophantineCertificate& c);
Json to_json(const MeasureEstimate& m);
Json to_json(const SweepRow& row);
Json to_json(const ConvergenceReport& rep);

/// One row per torus node: y coordinates then the field components.
std::string field_csv(const TorusField& f, const std::string& prefix);
/// F(t) samples of a boundary-layer solve.
std::string decay_csv(const BLSolution& sol);
/// eps, h, L2, interior H1 and the running rates.
std::string report_csv(const ConvergenceReport& rep);
std::string measure_csv(const std::vector<MeasureEstimate>& m);

}  // namespace homobl
