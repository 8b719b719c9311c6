#include "support.hpp"

#include <nethedge/errors.hpp>
#include <nethedge/portfolio.hpp>

#include <numeric>
#include <set>

namespace nethedge {
namespace {

TEST(CloseFar, DisjointSplit) {
  const auto r = testing::tickers(60);
  const auto cf = build_close_far(r, 30);
  EXPECT_EQ(cf.close.long_members, std::vector<std::string>(r.begin(), r.begin() + 30));
  EXPECT_EQ(cf.far.long_members, std::vector<std::string>(r.begin() + 30, r.end()));
  EXPECT_FALSE(cf.close.is_long_short());
  EXPECT_EQ(cf.close.name, "close");
  EXPECT_EQ(cf.far.name, "far");
}

TEST(CloseFar, Boundaries) {
  EXPECT_THROW(build_close_far(testing::tickers(59), 30), ConfigError);
  const auto r = testing::tickers(5);
  const auto cf = build_close_far(r, 1);
  EXPECT_EQ(cf.close.long_members, std::vector<std::string>{"T000"});
  EXPECT_EQ(cf.far.long_members, std::vector<std::string>{"T004"});
}

TEST(FarClose, LegsFromTheExtremes) {
  const auto r = testing::tickers(470);
  const auto fc = build_far_close(r);
  EXPECT_EQ(fc.name, "far-close");
  ASSERT_EQ(fc.long_members.size(), 15u);
  ASSERT_EQ(fc.short_members.size(), 15u);
  EXPECT_EQ(fc.short_members, std::vector<std::string>(r.begin(), r.begin() + 15));
  EXPECT_EQ(fc.long_members, std::vector<std::string>(r.end() - 15, r.end()));
  const auto far = build_close_far(r, 30).far;
  const std::set<std::string> far_set(far.long_members.begin(), far.long_members.end());
  for (const auto& t : fc.long_members) EXPECT_TRUE(far_set.count(t));
  try {
    (void)build_far_close(r, 0);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("empty legs"), std::string::npos);
  }
}

TEST(Benchmarks, SpAndRandom) {
  const auto u = testing::tickers(470);
  const auto b = build_benchmarks(u, 30, 42);
  EXPECT_EQ(b.sp.long_members.size(), 470u);
  EXPECT_EQ(b.random.long_members.size(), 30u);
  EXPECT_EQ(build_benchmarks(u, 30, 42).random.long_members, b.random.long_members);
  EXPECT_NE(build_benchmarks(u, 30, 43).random.long_members, b.random.long_members);
  const std::set<std::string> distinct(b.random.long_members.begin(), b.random.long_members.end());
  EXPECT_EQ(distinct.size(), 30u);
  auto all = build_benchmarks(testing::tickers(12), 12, 1);
  std::sort(all.random.long_members.begin(), all.random.long_members.end());
  EXPECT_EQ(all.random.long_members, all.sp.long_members);
}

ReturnsPanel random_panel(std::mt19937_64& rng, int t, int n) {
  return ReturnsPanel(testing::weekdays(Date(2020, 1, 1), static_cast<std::size_t>(t)), testing::tickers(static_cast<std::size_t>(n)),
                      testing::gaussian(t, n, rng, 0.01));
}

TEST(PortfolioReturns, Identities) {
  std::mt19937_64 rng(1);
  const auto p = random_panel(rng, 40, 10);
  EXPECT_EQ(portfolio_returns({"one", {"T003"}, {}}, p), p.column("T003"));
  Eigen::MatrixXd v = p.values();
  v.col(1) = v.col(0);
  const ReturnsPanel twin(p.dates(), p.tickers(), v);
  EXPECT_TRUE((portfolio_returns({"ls", {"T000"}, {"T001"}}, twin).array() == 0.0).all());
  EXPECT_THROW(portfolio_returns({"bad", {"T000"}, {"T000"}}, p), ConfigError);
  EXPECT_THROW(portfolio_returns({"bad", {"ZZZ"}, {}}, p), DataError);
}

TEST(PortfolioReturns, RandomPortfolioIsColumnMean) {
  std::mt19937_64 rng(2);
  const auto p = random_panel(rng, 50, 100);
  const auto b = build_benchmarks(p.tickers(), 30, 7);
  const auto series = portfolio_returns(b.random, p);
  for (Eigen::Index t = 0; t < p.rows(); ++t) {
    double s = 0.0;
    for (const auto& m : b.random.long_members) s += p.values()(t, *p.index_of(m));
    EXPECT_NEAR(series(t), s / 30.0, 1e-15);
  }
  const auto sp = portfolio_returns(b.sp, p);
  EXPECT_TRUE(sp.isApprox(p.values().rowwise().mean(), 1e-13));
}

TEST(PortfolioReturns, FarCloseIsDifferenceOfExtremes) {
  std::mt19937_64 rng(3);
  const auto p = random_panel(rng, 30, 60);
  const auto& r = p.tickers();
  const auto fc = portfolio_returns(build_far_close(r, 15), p);
  const auto close15 = portfolio_returns(build_close_far(r, 15).close, p);
  const auto far15 = portfolio_returns(build_close_far(r, 15).far, p);
  EXPECT_TRUE((fc.array() == (far15 - close15).array()).all());
}

TEST(PortfolioReturns, ColumnOrderIrrelevant) {
  std::mt19937_64 rng(4);
  const auto p = random_panel(rng, 30, 20);
  std::vector<std::string> perm = p.tickers();
  std::shuffle(perm.begin(), perm.end(), rng);
  const auto q = p.select_columns(perm);
  const Portfolio port{"x", {"T004", "T011", "T002"}, {"T019", "T000"}};
  EXPECT_EQ(portfolio_returns(port, p), portfolio_returns(port, q));
}

TEST(PortfolioReturns, ArithmeticAggregation) {
  const auto dates = testing::weekdays(Date(2020, 1, 1), 1);
  Eigen::MatrixXd v(1, 2);
  v << std::log(1.10), std::log(0.90);
  const ReturnsPanel p(dates, {"A", "B"}, v);
  const auto s = portfolio_returns({"x", {"A", "B"}, {}}, p, Aggregation::Arithmetic);
  EXPECT_NEAR(s(0), 0.0, 1e-15);
  const auto m = portfolio_returns({"x", {"A", "B"}, {}}, p, Aggregation::MeanLog);
  EXPECT_NEAR(m(0), 0.5 * (std::log(1.1) + std::log(0.9)), 1e-15);
}

}  // namespace
}  // namespace nethedge
