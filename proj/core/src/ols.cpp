#include "nethedge/ols.hpp"

#include "nethedge/errors.hpp"

#include <spdlog/spdlog.h>

namespace nethedge {

OlsFit ols_fit(const Eigen::VectorXd& y, const Eigen::MatrixXd& x) {
  const Eigen::Index n = x.rows();
  const Eigen::Index k = x.cols();
  if (y.size() != n) throw DataError("ols: y and X have different lengths");
  if (k == 0 || n < k + 2) throw DataError("ols: need at least cols(X) + 2 observations");
  if (!y.allFinite() || !x.allFinite()) throw NumericalError("ols: non-finite input");

  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(x);
  const Eigen::MatrixXd r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(r);
  const auto& sv = svd.singularValues();
  if (!(sv(k - 1) >= kCollinearityTolerance * sv(0))) {
    throw NumericalError("ols: design matrix is rank deficient");
  }

  OlsFit fit;
  fit.coefficients = qr.solve(y);
  fit.fitted = x * fit.coefficients;
  fit.residuals = y - fit.fitted;
  const Eigen::MatrixXd r_inv =
      r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(k, k));
  fit.xtx_inverse = r_inv * r_inv.transpose();

  const double ssr = fit.residuals.squaredNorm();
  const double sst = (y.array() - y.mean()).matrix().squaredNorm();
  fit.r_squared = sst > 0.0 ? 1.0 - ssr / sst : 0.0;
  fit.adj_r_squared = 1.0 - (1.0 - fit.r_squared) * static_cast<double>(n - 1) / static_cast<double>(n - k);
  return fit;
}

Eigen::MatrixXd design_with_constant(const FactorPanel& factors, const std::vector<std::string>& columns) {
  Eigen::MatrixXd x(factors.rows(), static_cast<Eigen::Index>(columns.size()) + 1);
  x.col(0).setOnes();
  for (std::size_t j = 0; j < columns.size(); ++j) x.col(static_cast<Eigen::Index>(j) + 1) = factors.column(columns[j]);
  return x;
}

Residualization residualize_panel(const ReturnsPanel& returns, const FactorPanel& factors) {
  return residualize_panel(returns, factors,
                           {std::string(kMktRf), std::string(kSmb), std::string(kHml), std::string(kRmw),
                            std::string(kCma)});
}

Residualization residualize_panel(const ReturnsPanel& returns, const FactorPanel& factors,
                                  const std::vector<std::string>& factor_columns) {
  if (returns.dates() != factors.dates()) throw DataError("residualize: panels are not aligned");
  const Eigen::MatrixXd x = design_with_constant(factors, factor_columns);

  // One factorization serves every column.
  const Eigen::Index k = x.cols();
  if (x.rows() < k + 2) throw DataError("residualize: too few observations");
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(x);
  const Eigen::MatrixXd r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(r);
  if (!(svd.singularValues()(k - 1) >= kCollinearityTolerance * svd.singularValues()(0))) {
    throw NumericalError("residualize: factor design matrix is rank deficient");
  }

  Residualization out;
  std::vector<std::string> kept;
  std::vector<Eigen::VectorXd> cols;
  for (Eigen::Index j = 0; j < returns.cols(); ++j) {
    const Eigen::VectorXd y = returns.values().col(j);
    const auto& ticker = returns.tickers()[static_cast<std::size_t>(j)];
    if (!y.allFinite()) {
      spdlog::warn("residualize: dropping {} (non-finite returns)", ticker);
      out.dropped.push_back(ticker);
      continue;
    }
    kept.push_back(ticker);
    cols.push_back(y - x * qr.solve(y));
  }
  Eigen::MatrixXd values(returns.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) values.col(static_cast<Eigen::Index>(j)) = cols[j];
  out.residuals = ResidualPanel(returns.dates(), std::move(kept), std::move(values));
  return out;
}

}  // namespace nethedge
