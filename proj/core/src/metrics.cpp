#include "nethedge/metrics.hpp"

#include "nethedge/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace nethedge {

namespace {

std::vector<double> excess(std::span<const double> r, std::span<const double> rf) {
  if (rf.size() != r.size()) throw DataError("risk-free series length mismatch");
  std::vector<double> x(r.size());
  for (std::size_t t = 0; t < r.size(); ++t) x[t] = r[t] - rf[t];
  return x;
}

double mean(const std::vector<double>& x) {
  double s = 0.0;
  for (const double v : x) s += v;
  return s / static_cast<double>(x.size());
}

}  // namespace

double sharpe(std::span<const double> returns, std::span<const double> risk_free, bool annualize) {
  if (returns.size() < 2) throw DataError("sharpe: need at least 2 observations");
  const auto x = excess(returns, risk_free);
  const double m = mean(x);
  double ss = 0.0;
  for (const double v : x) ss += (v - m) * (v - m);
  const double sd = std::sqrt(ss / static_cast<double>(x.size() - 1));
  // Rounding leaves a residue of order eps * |mean| on constant series.
  if (!(sd > 1e-12 * std::abs(m))) throw NumericalError("sharpe: zero variance");
  return m / sd * (annualize ? std::sqrt(kTradingDaysPerYear) : 1.0);
}

double sortino(std::span<const double> returns, std::span<const double> risk_free, bool annualize) {
  if (returns.empty()) throw DataError("sortino: empty series");
  const auto x = excess(returns, risk_free);
  double down = 0.0;
  bool any = false;
  for (const double v : x) {
    if (v < 0.0) {
      down += v * v;
      any = true;
    }
  }
  if (!any) throw DataError("sortino: no downside observations");
  const double dd = std::sqrt(down / static_cast<double>(x.size()));
  return mean(x) / dd * (annualize ? std::sqrt(kTradingDaysPerYear) : 1.0);
}

double omega(std::span<const double> returns, double threshold) {
  double gain = 0.0, loss = 0.0;
  for (const double r : returns) {
    gain += std::max(r - threshold, 0.0);
    loss += std::max(threshold - r, 0.0);
  }
  if (!(loss > 0.0)) throw DataError("omega: zero loss mass");
  return gain / loss;
}

double max_drawdown(std::span<const double> log_returns) {
  if (log_returns.empty()) throw DataError("mdd: empty series");
  double log_wealth = 0.0, log_peak = 0.0, worst = 0.0;
  for (const double r : log_returns) {
    log_wealth += r;
    log_peak = std::max(log_peak, log_wealth);
    worst = std::max(worst, -std::expm1(log_wealth - log_peak));
  }
  return worst;
}

double percentile_inclusive(std::span<const double> values, double p) {
  if (values.empty()) throw DataError("percentile: empty series");
  if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("percentile must lie in [0, 1]");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const double h = p * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

double value_at_risk(std::span<const double> returns, double level) {
  if (returns.size() < kMinVarObservations) throw DataError("var: need at least 20 observations");
  return -percentile_inclusive(returns, level);
}

PerfReport evaluate(std::span<const double> returns, std::span<const double> risk_free, bool annualize) {
  return {sharpe(returns, risk_free, annualize), sortino(returns, risk_free, annualize), omega(returns),
          max_drawdown(returns), value_at_risk(returns)};
}

std::string format_metrics_table(const std::vector<std::string>& portfolios, const std::vector<PerfReport>& reports) {
  if (portfolios.size() != reports.size()) throw DataError("metrics table: size mismatch");
  auto fmt = [](const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return std::string(buf);
  };
  std::vector<std::vector<std::string>> cells;
  cells.push_back({""});
  for (const auto& p : portfolios) cells[0].push_back(p);
  const std::pair<const char*, double PerfReport::*> rows[] = {
      {"Sharpe ratio", &PerfReport::sharpe}, {"Sortino ratio", &PerfReport::sortino},
      {"Omega ratio", &PerfReport::omega},   {"MDD", &PerfReport::mdd},
      {"VaR 5%", &PerfReport::var5}};
  for (const auto& [name, field] : rows) {
    std::vector<std::string> row{name};
    const bool percent = field == &PerfReport::mdd || field == &PerfReport::var5;
    for (const auto& r : reports) row.push_back(percent ? fmt("%.1f%%", 100.0 * (r.*field)) : fmt("%.3f", r.*field));
    cells.push_back(std::move(row));
  }
  std::vector<std::size_t> width(cells[0].size(), 0);
  for (const auto& row : cells)
    for (std::size_t j = 0; j < row.size(); ++j) width[j] = std::max(width[j], row[j].size());
  std::ostringstream out;
  for (const auto& row : cells) {
    std::string line;
    for (std::size_t j = 0; j < row.size(); ++j) line += row[j] + std::string(width[j] - row[j].size() + 2, ' ');
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out << line << '\n';
  }
  return out.str();
}

}  // namespace nethedge
