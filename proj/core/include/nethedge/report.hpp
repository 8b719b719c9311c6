#pragma once

#include "nethedge/data.hpp"
#include "nethedge/econometrics.hpp"
#include "nethedge/embedder.hpp"
#include "nethedge/metrics.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace nethedge {

/// Regression grids of one factor, one grid per base model.
struct FactorRegressions {
  std::string factor;
  std::vector<RegressionGrid> grids;
};

/// Performance metrics of one factor's portfolios plus benchmarks.
struct FactorMetrics {
  std::string factor;
  std::vector<std::string> portfolios;
  std::vector<PerfReport> reports;
};

/// Machine-readable twins of the text tables. Numbers use the shortest
/// round-trip representation, so parsing restores them exactly.
std::string regressions_to_csv(const std::vector<FactorRegressions>& regressions);
std::vector<FactorRegressions> regressions_from_csv(const std::filesystem::path& path);

std::string metrics_to_csv(const std::vector<FactorMetrics>& metrics);
std::vector<FactorMetrics> metrics_from_csv(const std::filesystem::path& path);

/// All regression and metric tables of a run, as text.
std::string render_report(const std::vector<FactorRegressions>& regressions, const std::vector<FactorMetrics>& metrics);

/// Re-renders the tables from the CSV artifacts of a run directory.
std::string render_report_from_artifacts(const std::filesystem::path& run_dir);

/// Per-sector averages over a universe: count, market cap (sum and
/// share), CO2 intensity, ESG, ESG promised, ESG realized.
std::string sector_summary_table(const ScoreTable& scores, const std::vector<std::string>& universe);
std::string sector_summary_csv(const ScoreTable& scores, const std::vector<std::string>& universe);

struct EmbeddingMap {
  std::string svg;
  bool projected = false;  ///< true when d > 2 and only the first two axes were drawn
};

/// SVG scatter of the first two embedding coordinates: stocks coloured by
/// sector, factor nodes in red with text labels.
EmbeddingMap render_embedding_map(const EmbeddingSpace& space, const std::vector<NodeAttributes>& attributes,
                                  const std::string& title);

/// Writes `<stem>.svg` and `<stem>.csv` (the coordinates) into `dir`.
EmbeddingMap emit_embedding_map(const EmbeddingSpace& space, const std::vector<NodeAttributes>& attributes,
                                const std::filesystem::path& dir, const std::string& stem, const std::string& title);

}  // namespace nethedge
