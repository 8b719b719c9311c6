#include "nethedge/factors.hpp"

#include "nethedge/csv.hpp"
#include "nethedge/errors.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace nethedge {

double weighted_emission(double scope1, double scope2, double market_cap) {
  if (!(market_cap > 0.0)) throw DataError("non-positive market cap");
  if (scope1 < 0.0 || scope2 < 0.0) throw DataError("negative emission scope");
  return (scope1 + scope2) / market_cap;
}

namespace {

struct Membership {
  std::vector<std::string> long_members;
  std::vector<std::string> short_members;
};

Membership select_members(const ScoreMap& scores, const ReturnsPanel& returns, double quantile,
                          Direction direction) {
  if (!(quantile > 0.0 && quantile < 0.5)) throw ConfigError("factor quantile must lie in (0, 0.5)");
  std::vector<std::pair<double, std::string>> ranked;
  for (const auto& [ticker, score] : scores) {
    if (!std::isfinite(score) || !returns.has(ticker)) continue;
    ranked.emplace_back(direction == Direction::HighMinusLow ? score : -score, ticker);
  }
  const std::size_t n = ranked.size();
  const auto k = static_cast<std::size_t>(std::floor(quantile * static_cast<double>(n)));
  if (n < kMinScoredTickers || k == 0) {
    throw DataError("too few scored tickers present in returns (" + std::to_string(n) + ")");
  }
  const bool all_equal = std::all_of(ranked.begin(), ranked.end(),
                                     [&](const auto& e) { return e.first == ranked.front().first; });
  if (all_equal) throw DataError("all scores identical");

  // Descending by key, ticker ascending among ties.
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  Membership m;
  for (std::size_t i = 0; i < k; ++i) m.long_members.push_back(ranked[i].second);
  for (std::size_t i = n - k; i < n; ++i) m.short_members.push_back(ranked[i].second);
  std::sort(m.long_members.begin(), m.long_members.end());
  std::sort(m.short_members.begin(), m.short_members.end());
  return m;
}

double leg_mean(const ReturnsPanel& returns, const std::vector<Eigen::Index>& cols, Eigen::Index t) {
  double s = 0.0;
  for (const auto c : cols) s += returns.values()(t, c);
  return s / static_cast<double>(cols.size());
}

std::vector<Eigen::Index> column_indices(const ReturnsPanel& returns, const std::vector<std::string>& tickers) {
  std::vector<Eigen::Index> cols;
  cols.reserve(tickers.size());
  for (const auto& t : tickers) cols.push_back(*returns.index_of(t));
  return cols;
}

}  // namespace

FactorSeries build_factor(std::string name, const ScoreMap& scores, const ReturnsPanel& returns,
                          double quantile, Direction direction) {
  auto m = select_members(scores, returns, quantile, direction);
  const auto lc = column_indices(returns, m.long_members);
  const auto sc = column_indices(returns, m.short_members);
  Eigen::VectorXd values(returns.rows());
  for (Eigen::Index t = 0; t < returns.rows(); ++t) values(t) = leg_mean(returns, lc, t) - leg_mean(returns, sc, t);
  return {std::move(name), returns.dates(), std::move(values), std::move(m.long_members),
          std::move(m.short_members)};
}

FactorSeries build_factor_yearly(std::string name, const std::function<ScoreMap(int year)>& scores_for_year,
                                 const ReturnsPanel& returns, double quantile, Direction direction) {
  FactorSeries out{std::move(name), returns.dates(), Eigen::VectorXd(returns.rows()), {}, {}};
  std::optional<int> current_year;
  std::vector<Eigen::Index> lc, sc;
  for (Eigen::Index t = 0; t < returns.rows(); ++t) {
    const int y = returns.dates()[static_cast<std::size_t>(t)].year();
    if (current_year != y) {
      auto m = select_members(scores_for_year(y), returns, quantile, direction);
      lc = column_indices(returns, m.long_members);
      sc = column_indices(returns, m.short_members);
      out.long_members = std::move(m.long_members);
      out.short_members = std::move(m.short_members);
      current_year = y;
    }
    out.values(t) = leg_mean(returns, lc, t) - leg_mean(returns, sc, t);
  }
  return out;
}

PromisedRealized split_granular(const GranularScores& granular, const GranularMapping& mapping) {
  std::vector<IndicatorClass> classes;
  classes.reserve(granular.indicators.size());
  bool any_promised = false, any_realized = false;
  for (const auto& label : granular.indicators) {
    const auto it = mapping.find(label);
    if (it == mapping.end()) throw DataError("unmapped indicator column: " + label);
    classes.push_back(it->second);
    any_promised |= it->second == IndicatorClass::Promised;
    any_realized |= it->second == IndicatorClass::Realized;
  }
  if (!any_promised || !any_realized) throw DataError("empty class after mapping");

  PromisedRealized out;
  for (std::size_t i = 0; i < granular.tickers.size(); ++i) {
    double sp = 0.0, sr = 0.0;
    int np = 0, nr = 0;
    for (std::size_t j = 0; j < classes.size(); ++j) {
      const double v = granular.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (std::isnan(v)) continue;
      if (classes[j] == IndicatorClass::Promised) {
        sp += v;
        ++np;
      } else if (classes[j] == IndicatorClass::Realized) {
        sr += v;
        ++nr;
      }
    }
    if (np > 0) out.promised[granular.tickers[i]] = sp / np;
    if (nr > 0) out.realized[granular.tickers[i]] = sr / nr;
  }
  return out;
}

GranularMapping load_granular_mapping(const std::filesystem::path& path) {
  const auto table = csv::read(path);
  if (table.header.size() != 2) throw DataError(path.string() + ": mapping needs exactly two columns");
  GranularMapping mapping;
  for (const auto& row : table.rows) {
    std::string cls = row[1];
    std::transform(cls.begin(), cls.end(), cls.begin(), [](unsigned char c) { return std::tolower(c); });
    IndicatorClass c{};
    if (cls == "promised") {
      c = IndicatorClass::Promised;
    } else if (cls == "realized") {
      c = IndicatorClass::Realized;
    } else if (cls == "excluded") {
      c = IndicatorClass::Excluded;
    } else {
      throw DataError(path.string() + ": unknown indicator class '" + row[1] + "'");
    }
    if (!mapping.emplace(row[0], c).second) throw DataError(path.string() + ": duplicate indicator " + row[0]);
  }
  return mapping;
}

GranularScores load_granular_scores(const std::filesystem::path& path) {
  const auto table = csv::read(path);
  if (table.header.empty() || table.header[0] != "ticker") throw DataError(path.string() + ": first column must be ticker");
  GranularScores g;
  g.indicators.assign(table.header.begin() + 1, table.header.end());
  g.values.resize(static_cast<Eigen::Index>(table.rows.size()), static_cast<Eigen::Index>(g.indicators.size()));
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    g.tickers.push_back(table.rows[i][0]);
    for (std::size_t j = 0; j < g.indicators.size(); ++j) {
      g.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = csv::parse_number(table.rows[i][j + 1]);
    }
  }
  return g;
}

namespace {

ScoreMap field_scores(const ScoreTable& table, std::optional<double> ScoreRecord::*field) {
  ScoreMap out;
  for (const auto& [ticker, rec] : table.records()) {
    if (const auto& v = rec.*field) out[ticker] = *v;
  }
  return out;
}

}  // namespace

ScoreMap co2_scores(const ScoreTable& table) {
  ScoreMap out;
  for (const auto& [ticker, rec] : table.records()) {
    if (rec.co2_scope1 && rec.co2_scope2 && rec.market_cap) {
      out[ticker] = weighted_emission(*rec.co2_scope1, *rec.co2_scope2, *rec.market_cap);
    }
  }
  return out;
}

ScoreMap esg_scores(const ScoreTable& table) { return field_scores(table, &ScoreRecord::esg); }
ScoreMap esg_promised_scores(const ScoreTable& table) { return field_scores(table, &ScoreRecord::esg_promised); }
ScoreMap esg_realized_scores(const ScoreTable& table) { return field_scores(table, &ScoreRecord::esg_realized); }

}  // namespace nethedge
