#include "nethedge/portfolio.hpp"

#include "nethedge/csv.hpp"
#include "nethedge/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace nethedge {

namespace {

void check_ranking(const std::vector<std::string>& ranking, std::size_t k) {
  if (k == 0) throw ConfigError("portfolio: empty legs (k = 0)");
  if (ranking.size() < 2 * k) {
    throw ConfigError("portfolio: ranking of " + std::to_string(ranking.size()) + " names is shorter than 2k = " +
                      std::to_string(2 * k));
  }
}

}  // namespace

CloseFar build_close_far(const std::vector<std::string>& ranking, std::size_t k) {
  check_ranking(ranking, k);
  CloseFar out;
  out.close.name = "close";
  out.far.name = "far";
  out.close.long_members.assign(ranking.begin(), ranking.begin() + static_cast<std::ptrdiff_t>(k));
  out.far.long_members.assign(ranking.end() - static_cast<std::ptrdiff_t>(k), ranking.end());
  return out;
}

Portfolio build_far_close(const std::vector<std::string>& ranking, std::size_t k) {
  check_ranking(ranking, k);
  Portfolio p;
  p.name = "far-close";
  p.long_members.assign(ranking.end() - static_cast<std::ptrdiff_t>(k), ranking.end());
  p.short_members.assign(ranking.begin(), ranking.begin() + static_cast<std::ptrdiff_t>(k));
  return p;
}

Benchmarks build_benchmarks(const std::vector<std::string>& universe, std::size_t n_random, std::uint64_t seed) {
  if (n_random == 0) throw ConfigError("random portfolio needs at least one name");
  if (universe.size() < n_random) throw ConfigError("universe smaller than the random portfolio size");
  Benchmarks b;
  b.sp.name = "S&P";
  b.sp.long_members = universe;
  b.random.name = "random";
  std::mt19937_64 rng(seed);
  // Partial Fisher-Yates on a copy; uniform without replacement.
  auto pool = universe;
  for (std::size_t i = 0; i < n_random; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  b.random.long_members.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(n_random));
  return b;
}

Eigen::VectorXd portfolio_returns(const Portfolio& p, const ReturnsPanel& returns, Aggregation aggregation) {
  if (p.long_members.empty()) throw ConfigError("portfolio " + p.name + " has no long members");
  auto indices = [&](const std::vector<std::string>& names) {
    std::vector<Eigen::Index> idx;
    for (const auto& t : names) {
      const auto i = returns.index_of(t);
      if (!i) throw DataError("portfolio " + p.name + ": missing member " + t);
      idx.push_back(*i);
    }
    return idx;
  };
  const auto li = indices(p.long_members);
  const auto si = indices(p.short_members);
  for (const auto i : li) {
    if (std::find(si.begin(), si.end(), i) != si.end()) throw ConfigError("portfolio " + p.name + ": name on both legs");
  }
  const auto& r = returns.values();
  auto leg = [&](const std::vector<Eigen::Index>& idx, Eigen::Index t) {
    double s = 0.0;
    for (const auto i : idx) s += aggregation == Aggregation::MeanLog ? r(t, i) : std::expm1(r(t, i));
    return s / static_cast<double>(idx.size());
  };
  Eigen::VectorXd out(returns.rows());
  for (Eigen::Index t = 0; t < returns.rows(); ++t) {
    const double l = leg(li, t);
    const double s = si.empty() ? 0.0 : leg(si, t);
    out(t) = aggregation == Aggregation::MeanLog ? l - s : std::log1p(l - s);
  }
  return out;
}

void write_portfolios(const std::vector<Portfolio>& portfolios, const std::filesystem::path& path) {
  std::ostringstream out;
  out << "name,ticker,side,weight\n";
  for (const auto& p : portfolios) {
    for (const auto& t : p.long_members) {
      out << p.name << ',' << t << ",long," << csv::format_number(1.0 / static_cast<double>(p.long_members.size())) << '\n';
    }
    for (const auto& t : p.short_members) {
      out << p.name << ',' << t << ",short," << csv::format_number(1.0 / static_cast<double>(p.short_members.size())) << '\n';
    }
  }
  csv::write_text(path, out.str());
}

}  // namespace nethedge
