#pragma once

#include "nethedge/data.hpp"
#include "nethedge/econometrics.hpp"
#include "nethedge/embedder.hpp"
#include "nethedge/errors.hpp"
#include "nethedge/factors.hpp"
#include "nethedge/graph.hpp"
#include "nethedge/portfolio.hpp"
#include "nethedge/report.hpp"
#include "nethedge/synthetic.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace nethedge {

inline constexpr std::string_view kCo2Factor = "CO2";
inline constexpr std::string_view kEsgFactor = "ESG";
inline constexpr std::string_view kEsgPromisedFactor = "ESGp";
inline constexpr std::string_view kEsgRealizedFactor = "ESGr";

/// Everything a run needs. Seeds are explicit; nothing reads the clock.
struct PipelineConfig {
  // Inputs: either files or a synthetic market.
  std::filesystem::path prices;
  std::filesystem::path factors;
  std::filesystem::path scores;
  std::filesystem::path granular_scores;   ///< optional, overrides ESGp/ESGr
  std::filesystem::path granular_mapping;  ///< required with granular_scores
  std::optional<SyntheticMarketSpec> synthetic;
  FactorScale factor_scale = FactorScale::Decimal;

  Date start{2015, 1, 1};
  Date end{2020, 12, 31};  ///< inclusive
  /// Expanding windows [start, start + k years) for k = 1, 2, ... up to end.
  bool expanding = false;

  std::vector<std::string> factor_list{std::string(kCo2Factor), std::string(kEsgFactor),
                                       std::string(kEsgPromisedFactor), std::string(kEsgRealizedFactor)};
  double factor_quantile = kDefaultFactorQuantile;
  bool rebalance_yearly = false;
  bool residualize_factors = false;

  GainTransform gain = GainTransform::Square;
  WalkConfig walk;
  SgnsConfig sgns;

  std::size_t k_close_far = kCloseFarSize;
  std::size_t k_longshort = kLongShortLegSize;
  std::size_t n_random = kRandomPortfolioSize;
  std::uint64_t random_seed = 42;
  Aggregation aggregation = Aggregation::MeanLog;

  std::vector<ModelName> models{ModelName::CAPM, ModelName::FF3, ModelName::FF5};
  std::optional<int> nw_lag;  ///< nullopt = automatic rule
  ExcessReturn excess = ExcessReturn::Auto;
  bool annualize = true;

  int threads = 1;
  std::filesystem::path out_dir = "nethedge-out";
};

/// Throws ConfigError (end before start, missing inputs, bad sizes, ...).
void validate(const PipelineConfig& config);

/// JSON representation; `out_dir` is not part of it.
std::string config_to_json(const PipelineConfig& config);
/// Accepts a config document or a run manifest (its "config" member).
/// Missing keys keep their defaults. Throws ConfigError.
PipelineConfig config_from_json(const std::string& text);
PipelineConfig load_config(const std::filesystem::path& path);

/// Sets the walk, SGNS and random-portfolio seeds.
void set_all_seeds(PipelineConfig& config, std::uint64_t seed);

struct MarketData {
  PricePanel prices;
  FactorPanel factors;
  ScoreTable scores;
  std::optional<GranularScores> granular;
  std::optional<GranularMapping> mapping;
};

/// Loads files or generates the synthetic market.
MarketData load_market_data(const PipelineConfig& config);

struct FactorAnalysis {
  std::string factor;
  std::vector<RankedNode> ranking;  ///< stocks, nearest first
  Portfolio close;
  Portfolio far;
  Portfolio far_close;
  FactorRegressions regressions;
  FactorMetrics metrics;
  /// Mean distance from the factor node to each sector's stocks.
  std::map<GicsSector, double> sector_distance;
  std::optional<GicsSector> nearest_sector;
};

struct PipelineResult {
  std::string label;
  Date first_date;
  Date last_date;
  ReturnsPanel returns;        ///< window returns of the analysed stocks
  FactorPanel factor_panel;    ///< market factors plus constructed factors
  std::vector<FactorSeries> factors;
  std::vector<std::string> dropped_tickers;
  FilteredGraph graph;
  std::vector<NodeAttributes> nodes;
  EmbeddingSpace embedding;
  Benchmarks benchmarks;
  std::vector<FactorAnalysis> analyses;
};

/// Pipeline stage of a failure, attached to the exception message.
class StageError : public Error {
 public:
  StageError(std::string stage, const Error& cause);
  [[nodiscard]] const std::string& stage() const { return stage_; }
  /// 2 config, 3 data, 4 numerical.
  [[nodiscard]] int exit_code() const { return exit_code_; }

 private:
  std::string stage_;
  int exit_code_;
};

/// Runs every stage on the dates in [first, last_exclusive). Throws
/// StageError.
PipelineResult analyze(const PipelineConfig& config, const MarketData& data, Date first, Date last_exclusive,
                       std::string label);

/// Writes every artifact of `result` plus manifest.json into `dir`.
/// Returns the artifact file names written (manifest last).
std::vector<std::string> write_artifacts(const PipelineConfig& config, const MarketData& data,
                                         const PipelineResult& result, const std::filesystem::path& dir);

/// Full pipeline over the configured window, artifacts in config.out_dir.
PipelineResult run_pipeline(const PipelineConfig& config);

struct WindowSpec {
  std::string label;
  Date first;
  Date last_exclusive;
};

/// [start, start + k years) for k = 1.. until the window reaches end.
/// Throws ConfigError when fewer than two windows result.
std::vector<WindowSpec> expanding_windows(Date start, Date end_inclusive);

struct WindowSummary {
  std::string window;
  std::string factor;
  std::optional<GicsSector> nearest_sector;
  double mean_distance = 0.0;
};

struct ExpandingResult {
  std::vector<PipelineResult> windows;
  std::vector<WindowSummary> summary;
};

/// Re-runs the pipeline on each expanding window (out_dir/window_XX_label)
/// and writes windows_summary.csv plus a manifest.
ExpandingResult run_expanding_windows(const PipelineConfig& config);

/// Hex SHA-256 of a byte string.
std::string sha256_hex(std::string_view bytes);

}  // namespace nethedge
