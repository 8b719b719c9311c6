#pragma once

#include <nethedge/data.hpp>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace nethedge::testing {

// Fresh scratch directory named after the running test.
inline std::filesystem::path scratch_dir() {
  const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
  auto dir = std::filesystem::temp_directory_path() / "nethedge-tests" /
             (std::string(info->test_suite_name()) + "." + info->name());
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::vector<Date> weekdays(Date start, std::size_t n) {
  std::vector<Date> out;
  for (Date d = start; out.size() < n; d = d.plus_days(1)) {
    if (d.is_weekday()) out.push_back(d);
  }
  return out;
}

inline std::vector<std::string> tickers(std::size_t n, const std::string& prefix = "T") {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) {
    const auto digits = std::to_string(i);
    out.push_back(prefix + std::string(digits.size() < 3 ? 3 - digits.size() : 0, '0') + digits);
  }
  return out;
}

inline Eigen::MatrixXd gaussian(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng, double sd = 1.0) {
  std::normal_distribution<double> n(0.0, sd);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = n(rng);
  }
  return m;
}

// Canonical factor panel with random columns.
inline FactorPanel random_factors(const std::vector<Date>& dates, std::mt19937_64& rng) {
  const auto n = static_cast<Eigen::Index>(dates.size());
  Eigen::MatrixXd v = gaussian(n, 6, rng, 0.01);
  v.col(5).setConstant(0.0001);
  return FactorPanel(dates, {"MKT_RF", "SMB", "HML", "RMW", "CMA", "RF"}, v);
}

}  // namespace nethedge::testing
