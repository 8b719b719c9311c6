#pragma once

#include "nethedge/data.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace nethedge {

enum class ModelName { CAPM, FF3, FF5 };

ModelName parse_model(std::string_view text);
std::string_view to_string(ModelName model);

/// Factor model, optionally augmented with one extra factor column. A
/// constant is always included.
struct ModelSpec {
  ModelName name = ModelName::FF3;
  std::optional<std::string> extra_factor;

  [[nodiscard]] std::vector<std::string> regressors() const;
  /// e.g. "FF3" or "FF3+CO2".
  [[nodiscard]] std::string label() const;
};

/// Whether the dependent variable is net of RF.
enum class ExcessReturn {
  Auto,    ///< long-only portfolios net of RF, long-short raw
  Always,
  Never,
};

/// floor(4 (T/100)^(2/9)).
int auto_newey_west_lag(std::size_t observations);

/// Newey-West covariance of OLS coefficients with Bartlett weights
/// 1 - l/(lag+1), sandwiched by (X'X)^-1 and scaled by T/(T-k). Throws
/// DataError when lag >= T or lag < 0.
Eigen::MatrixXd newey_west_cov(const Eigen::MatrixXd& x, const Eigen::VectorXd& residuals, int lag);

/// Same with a precomputed (X'X)^-1.
Eigen::MatrixXd newey_west_cov(const Eigen::MatrixXd& x, const Eigen::VectorXd& residuals, int lag,
                               const Eigen::MatrixXd& xtx_inverse);

/// "***" below 1%, "**" below 5%, "*" below 10%, else "".
std::string significance_stars(double p_value);

struct Coefficient {
  std::string term;  ///< "alpha" or a factor column name
  double estimate = 0.0;
  double hac_se = 0.0;
  double t_stat = 0.0;
  double p_value = 1.0;
  std::string stars;
};

struct RegressionResult {
  std::string model;      ///< ModelSpec label
  std::string portfolio;  ///< portfolio name
  std::vector<Coefficient> coefficients;
  double r_squared = 0.0;
  double adj_r_squared = 0.0;
  std::size_t n_obs = 0;
  int lag_used = 0;

  [[nodiscard]] const Coefficient* find(std::string_view term) const;
};

/// OLS of the portfolio series on the model's factors with Newey-West
/// standard errors and Student-t p-values on T - k degrees of freedom.
/// `lag` nullopt selects auto_newey_west_lag.
RegressionResult run_model(const ModelSpec& spec, const std::string& portfolio_name,
                           const Eigen::VectorXd& portfolio_series, bool long_short, const FactorPanel& factors,
                           std::optional<int> lag = std::nullopt, ExcessReturn excess = ExcessReturn::Auto);

/// Estimate rounded to 4 decimals ("-0.0000" kept for small negatives).
std::string format_estimate(double value);

/// Results laid out as paired column blocks: every portfolio without the
/// extra factor, then every portfolio with it.
struct RegressionGrid {
  std::string base_label;
  std::string extended_label;
  std::vector<std::string> portfolios;
  std::vector<RegressionResult> base;      ///< one per portfolio
  std::vector<RegressionResult> extended;  ///< one per portfolio
};

/// Plain-text table: coefficient rows with HAC standard errors in parentheses
/// underneath, stars appended, then R-squared and adjusted R-squared.
std::string format_table(const RegressionGrid& grid);

}  // namespace nethedge
