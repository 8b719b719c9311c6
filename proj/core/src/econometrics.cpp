#include "nethedge/econometrics.hpp"

#include "nethedge/errors.hpp"
#include "nethedge/ols.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace nethedge {

ModelName parse_model(std::string_view text) {
  std::string upper(text);
  for (auto& ch : upper) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  if (upper == "CAPM") return ModelName::CAPM;
  if (upper == "FF3") return ModelName::FF3;
  if (upper == "FF5") return ModelName::FF5;
  throw ConfigError("unknown model: " + std::string(text));
}

std::string_view to_string(ModelName model) {
  switch (model) {
    case ModelName::CAPM: return "CAPM";
    case ModelName::FF3: return "FF3";
    case ModelName::FF5: return "FF5";
  }
  return "FF3";
}

std::vector<std::string> ModelSpec::regressors() const {
  std::vector<std::string> r{std::string(kMktRf)};
  if (name != ModelName::CAPM) {
    r.emplace_back(kSmb);
    r.emplace_back(kHml);
  }
  if (name == ModelName::FF5) {
    r.emplace_back(kRmw);
    r.emplace_back(kCma);
  }
  if (extra_factor) r.push_back(*extra_factor);
  return r;
}

std::string ModelSpec::label() const {
  std::string l(to_string(name));
  if (extra_factor) l += "+" + *extra_factor;
  return l;
}

int auto_newey_west_lag(std::size_t observations) {
  return static_cast<int>(std::floor(4.0 * std::pow(static_cast<double>(observations) / 100.0, 2.0 / 9.0)));
}

Eigen::MatrixXd newey_west_cov(const Eigen::MatrixXd& x, const Eigen::VectorXd& residuals, int lag) {
  const Eigen::MatrixXd xtx = x.transpose() * x;
  return newey_west_cov(x, residuals, lag, xtx.ldlt().solve(Eigen::MatrixXd::Identity(x.cols(), x.cols())));
}

Eigen::MatrixXd newey_west_cov(const Eigen::MatrixXd& x, const Eigen::VectorXd& residuals, int lag,
                               const Eigen::MatrixXd& xtx_inverse) {
  const Eigen::Index t = x.rows();
  const Eigen::Index k = x.cols();
  if (residuals.size() != t) throw DataError("newey-west: residuals and X have different lengths");
  if (lag < 0 || lag >= t) throw DataError("newey-west: lag must lie in [0, T)");
  if (t <= k) throw DataError("newey-west: need more observations than regressors");

  const Eigen::MatrixXd u = x.array().colwise() * residuals.array();
  Eigen::MatrixXd s = u.transpose() * u;
  for (int l = 1; l <= lag; ++l) {
    const double w = 1.0 - static_cast<double>(l) / static_cast<double>(lag + 1);
    const Eigen::MatrixXd gamma = u.bottomRows(t - l).transpose() * u.topRows(t - l);
    s += w * (gamma + gamma.transpose());
  }
  Eigen::MatrixXd cov = xtx_inverse * s * xtx_inverse;
  cov *= static_cast<double>(t) / static_cast<double>(t - k);
  return 0.5 * (cov + cov.transpose());
}

std::string significance_stars(double p) {
  if (std::isnan(p)) return "";
  if (p < 0.01) return "***";
  if (p < 0.05) return "**";
  if (p < 0.10) return "*";
  return "";
}

const Coefficient* RegressionResult::find(std::string_view term) const {
  const auto it = std::find_if(coefficients.begin(), coefficients.end(), [&](const auto& c) { return c.term == term; });
  return it == coefficients.end() ? nullptr : &*it;
}

RegressionResult run_model(const ModelSpec& spec, const std::string& portfolio_name,
                           const Eigen::VectorXd& portfolio_series, bool long_short, const FactorPanel& factors,
                           std::optional<int> lag, ExcessReturn excess) {
  if (portfolio_series.size() != factors.rows()) throw DataError("run_model: series and factors are not aligned");
  const auto regressors = spec.regressors();
  const Eigen::MatrixXd x = design_with_constant(factors, regressors);
  Eigen::VectorXd y = portfolio_series;
  const bool subtract_rf = excess == ExcessReturn::Always || (excess == ExcessReturn::Auto && !long_short);
  if (subtract_rf) y -= factors.column(kRf);

  const OlsFit fit = ols_fit(y, x);
  const auto n = static_cast<std::size_t>(x.rows());
  const int lag_used = lag ? *lag : auto_newey_west_lag(n);
  const Eigen::MatrixXd cov = newey_west_cov(x, fit.residuals, lag_used, fit.xtx_inverse);

  const double dof = static_cast<double>(x.rows() - x.cols());
  const boost::math::students_t dist(dof);
  RegressionResult r;
  r.model = spec.label();
  r.portfolio = portfolio_name;
  r.r_squared = fit.r_squared;
  r.adj_r_squared = fit.adj_r_squared;
  r.n_obs = n;
  r.lag_used = lag_used;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    Coefficient c;
    c.term = j == 0 ? "alpha" : regressors[static_cast<std::size_t>(j - 1)];
    c.estimate = fit.coefficients(j);
    c.hac_se = std::sqrt(std::max(cov(j, j), 0.0));
    if (c.hac_se > 0.0) {
      c.t_stat = c.estimate / c.hac_se;
      c.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(c.t_stat)));
    } else if (c.estimate == 0.0) {
      c.t_stat = 0.0;
      c.p_value = 1.0;
    } else {
      c.t_stat = std::copysign(std::numeric_limits<double>::infinity(), c.estimate);
      c.p_value = 0.0;
    }
    c.stars = significance_stars(c.p_value);
    r.coefficients.push_back(std::move(c));
  }
  return r;
}

std::string format_estimate(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", value);
  return buf;
}

namespace {

std::string term_label(std::string_view term) {
  if (term == "alpha") return "alpha";
  if (term == kMktRf) return "rM-rF";
  return std::string(term);
}

}  // namespace

std::string format_table(const RegressionGrid& grid) {
  const std::size_t np = grid.portfolios.size();
  if (grid.base.size() != np || grid.extended.size() != np) throw DataError("format_table: grid size mismatch");

  // Row order: every term of the extended model (a superset of the base).
  std::vector<std::string> terms;
  for (const auto& res : {grid.extended, grid.base}) {
    for (const auto& r : res) {
      for (const auto& c : r.coefficients) {
        if (std::find(terms.begin(), terms.end(), c.term) == terms.end()) terms.push_back(c.term);
      }
    }
  }

  std::vector<const RegressionResult*> cols;
  for (const auto& r : grid.base) cols.push_back(&r);
  for (const auto& r : grid.extended) cols.push_back(&r);

  std::vector<std::vector<std::string>> cells;
  cells.push_back({""});
  for (std::size_t i = 0; i < 2 * np; ++i) cells[0].push_back(grid.portfolios[i % np]);
  for (const auto& term : terms) {
    std::vector<std::string> est{term_label(term)}, se{""};
    for (const auto* r : cols) {
      if (const auto* c = r->find(term)) {
        est.push_back(format_estimate(c->estimate) + c->stars);
        se.push_back("(" + format_estimate(c->hac_se) + ")");
      } else {
        est.emplace_back("-");
        se.emplace_back("-");
      }
    }
    cells.push_back(std::move(est));
    cells.push_back(std::move(se));
  }
  std::vector<std::string> r2{"R-squared"}, adj{"Adj. R-squared"};
  for (const auto* r : cols) {
    r2.push_back(format_estimate(r->r_squared));
    adj.push_back(format_estimate(r->adj_r_squared));
  }
  cells.push_back(std::move(r2));
  cells.push_back(std::move(adj));

  std::vector<std::size_t> width(cells[0].size(), 0);
  for (const auto& row : cells)
    for (std::size_t j = 0; j < row.size(); ++j) width[j] = std::max(width[j], row[j].size());

  std::size_t block = 0;
  for (std::size_t j = 1; j <= np; ++j) block += width[j] + 2;
  std::ostringstream out;
  auto pad = [](const std::string& s, std::size_t w) { return s + std::string(w - s.size(), ' '); };
  out << std::string(width[0] + 2, ' ') << pad(grid.base_label, block) << grid.extended_label << '\n';
  for (const auto& row : cells) {
    std::string line;
    for (std::size_t j = 0; j < row.size(); ++j) line += pad(row[j], width[j]) + (j + 1 < row.size() ? "  " : "");
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out << line << '\n';
  }
  return out.str();
}

}  // namespace nethedge
