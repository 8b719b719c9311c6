#pragma once

#include "nethedge/data.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace nethedge {

/// Ordinary least squares fit. Coefficients follow the design-matrix column
/// order (intercept first when the caller puts it first).
struct OlsFit {
  Eigen::VectorXd coefficients;
  Eigen::VectorXd residuals;
  Eigen::VectorXd fitted;
  double r_squared = 0.0;
  double adj_r_squared = 0.0;
  /// (X'X)^-1, kept for sandwich covariance estimators.
  Eigen::MatrixXd xtx_inverse;
};

/// Smallest/largest singular value ratio below which X is rank deficient.
inline constexpr double kCollinearityTolerance = 1e-10;

/// Solves min ||y - X b|| by Householder QR. R^2 = 1 - SSR/SST with SST
/// about the mean; R^2 is 0 when SST is 0. Throws DataError when
/// rows(X) < cols(X) + 2 and NumericalError when X is rank deficient.
OlsFit ols_fit(const Eigen::VectorXd& y, const Eigen::MatrixXd& x);

/// [1, columns...] design matrix.
Eigen::MatrixXd design_with_constant(const FactorPanel& factors, const std::vector<std::string>& columns);

class ResidualPanel : public TimeSeriesPanel {
 public:
  using TimeSeriesPanel::TimeSeriesPanel;
  [[nodiscard]] const std::vector<std::string>& tickers() const { return labels_; }
};

struct Residualization {
  ResidualPanel residuals;
  std::vector<std::string> dropped;  ///< tickers whose regression failed
};

/// Residuals of each stock on [1, MKT_RF, SMB, HML, RMW, CMA]. The panels
/// must already be aligned. Columns whose regression fails are dropped.
Residualization residualize_panel(const ReturnsPanel& returns, const FactorPanel& factors);

/// Same, against an arbitrary factor list.
Residualization residualize_panel(const ReturnsPanel& returns, const FactorPanel& factors,
                                  const std::vector<std::string>& factor_columns);

}  // namespace nethedge
