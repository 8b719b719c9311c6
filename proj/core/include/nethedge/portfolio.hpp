#pragma once

#include "nethedge/data.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace nethedge {

/// Equal-weight long and (optional) short legs; each leg's weights sum to 1.
struct Portfolio {
  std::string name;
  std::vector<std::string> long_members;
  std::vector<std::string> short_members;

  [[nodiscard]] bool is_long_short() const { return !short_members.empty(); }
};

inline constexpr std::size_t kCloseFarSize = 30;
inline constexpr std::size_t kLongShortLegSize = 15;
inline constexpr std::size_t kRandomPortfolioSize = 30;

struct CloseFar {
  Portfolio close;
  Portfolio far;
};

/// `ranking` is ordered nearest first. close = first k, far = last k.
CloseFar build_close_far(const std::vector<std::string>& ranking, std::size_t k = kCloseFarSize);

/// Long the k furthest, short the k closest.
Portfolio build_far_close(const std::vector<std::string>& ranking, std::size_t k = kLongShortLegSize);

struct Benchmarks {
  Portfolio sp;
  Portfolio random;
};

/// Equal-weight whole universe plus a seeded uniform sample of n_random
/// names without replacement.
Benchmarks build_benchmarks(const std::vector<std::string>& universe, std::size_t n_random = kRandomPortfolioSize,
                            std::uint64_t seed = 42);

enum class Aggregation {
  MeanLog,    ///< equal-weight mean of member log returns
  Arithmetic  ///< log of the equal-weight simple-return aggregate
};

/// Daily return series: long-leg mean minus short-leg mean. Throws
/// DataError when a member is missing from the panel.
Eigen::VectorXd portfolio_returns(const Portfolio& p, const ReturnsPanel& returns,
                                  Aggregation aggregation = Aggregation::MeanLog);

/// `name,ticker,side,weight` rows for every portfolio.
void write_portfolios(const std::vector<Portfolio>& portfolios, const std::filesystem::path& path);

}  // namespace nethedge
