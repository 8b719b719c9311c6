#pragma once

#include "nethedge/data.hpp"

#include <Eigen/Dense>

#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace nethedge {

/// Tons of CO2 (scope 1 + scope 2) per unit of market capitalization.
/// Throws DataError for a non-positive market cap or negative scopes.
double weighted_emission(double scope1, double scope2, double market_cap);

enum class Direction { HighMinusLow, LowMinusHigh };

using ScoreMap = std::map<std::string, double, std::less<>>;

/// Long-short quantile factor: equal-weight mean of the long members'
/// returns minus that of the short members, per date.
struct FactorSeries {
  std::string name;
  std::vector<Date> dates;
  Eigen::VectorXd values;
  std::vector<std::string> long_members;
  std::vector<std::string> short_members;
};

inline constexpr double kDefaultFactorQuantile = 0.30;
inline constexpr std::size_t kMinScoredTickers = 7;

/// Builds a factor from a score per ticker. Only tickers present in both
/// `scores` and `returns` take part. Members are the floor(quantile * n)
/// extremes of the ranking by (score, ticker); ties resolve by ticker
/// lexicographic order so the result does not depend on input order.
FactorSeries build_factor(std::string name, const ScoreMap& scores, const ReturnsPanel& returns,
                          double quantile = kDefaultFactorQuantile,
                          Direction direction = Direction::HighMinusLow);

/// Same construction with membership recomputed at each calendar year
/// boundary from `scores_for_year(year)`. Members reported are those of
/// the last year.
FactorSeries build_factor_yearly(std::string name,
                                 const std::function<ScoreMap(int year)>& scores_for_year,
                                 const ReturnsPanel& returns,
                                 double quantile = kDefaultFactorQuantile,
                                 Direction direction = Direction::HighMinusLow);

enum class IndicatorClass { Promised, Realized, Excluded };

/// Granular indicator label -> class.
using GranularMapping = std::map<std::string, IndicatorClass, std::less<>>;

/// ticker x indicator matrix of granular ESG values; NaN marks a missing
/// value.
struct GranularScores {
  std::vector<std::string> tickers;
  std::vector<std::string> indicators;
  Eigen::MatrixXd values;
};

struct PromisedRealized {
  ScoreMap promised;
  ScoreMap realized;
};

/// Promised / realized score = mean of a ticker's present indicators in
/// that class. Tickers with no present indicator in a class are absent
/// from that class's map.
PromisedRealized split_granular(const GranularScores& granular, const GranularMapping& mapping);

/// Two-column file `indicator_label, class` (promised|realized|excluded).
GranularMapping load_granular_mapping(const std::filesystem::path& path);

/// First column `ticker`, remaining columns indicator labels.
GranularScores load_granular_scores(const std::filesystem::path& path);

/// Score maps extracted from a score table.
ScoreMap co2_scores(const ScoreTable& table);
ScoreMap esg_scores(const ScoreTable& table);
ScoreMap esg_promised_scores(const ScoreTable& table);
ScoreMap esg_realized_scores(const ScoreTable& table);

}  // namespace nethedge
