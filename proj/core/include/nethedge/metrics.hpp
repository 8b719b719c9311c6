#pragma once

#include <span>
#include <string>
#include <vector>

namespace nethedge {

inline constexpr double kTradingDaysPerYear = 252.0;

/// mean(r - rf) / sd(r - rf), sample sd, times sqrt(252) when annualized.
/// Throws NumericalError for zero variance, DataError for < 2 points.
double sharpe(std::span<const double> returns, std::span<const double> risk_free, bool annualize = true);

/// mean(r - rf) / sqrt(mean over all t of min(r - rf, 0)^2), times
/// sqrt(252) when annualized. Throws DataError without a downside point.
double sortino(std::span<const double> returns, std::span<const double> risk_free, bool annualize = true);

/// sum max(r - threshold, 0) / sum max(threshold - r, 0). Throws DataError
/// for zero loss mass.
double omega(std::span<const double> returns, double threshold = 0.0);

/// Largest peak-to-trough fall of exp(cumsum(r)) starting from wealth 1.
double max_drawdown(std::span<const double> log_returns);

/// Percentile with linear interpolation between order statistics at
/// position p * (n - 1).
double percentile_inclusive(std::span<const double> values, double p);

inline constexpr std::size_t kMinVarObservations = 20;

/// Negated 5% (or `level`) empirical percentile: a positive number is a
/// loss. Throws DataError for fewer than 20 observations.
double value_at_risk(std::span<const double> returns, double level = 0.05);

struct PerfReport {
  double sharpe = 0.0;
  double sortino = 0.0;
  double omega = 0.0;
  double mdd = 0.0;
  double var5 = 0.0;
};

PerfReport evaluate(std::span<const double> returns, std::span<const double> risk_free, bool annualize = true);

/// Rows = metrics, columns = portfolios; ratios to 3 decimals, MDD and
/// VaR in percent to 1 decimal.
std::string format_metrics_table(const std::vector<std::string>& portfolios, const std::vector<PerfReport>& reports);

}  // namespace nethedge
