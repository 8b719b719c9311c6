#pragma once

#include <Eigen/Dense>

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nethedge {

/// Calendar date (no time of day).
class Date {
 public:
  Date() = default;
  explicit Date(std::chrono::sys_days days) : days_(days) {}
  Date(int year, unsigned month, unsigned day);

  /// Parses YYYY-MM-DD. Throws DataError.
  static Date parse(std::string_view text);

  [[nodiscard]] std::string iso() const;
  [[nodiscard]] int year() const;
  [[nodiscard]] std::chrono::sys_days days() const { return days_; }
  [[nodiscard]] bool is_weekday() const;

  /// Same month/day, shifted by whole years (Feb 29 clamps to Feb 28).
  [[nodiscard]] Date plus_years(int years) const;
  [[nodiscard]] Date plus_days(int n) const { return Date(days_ + std::chrono::days{n}); }

  friend auto operator<=>(const Date&, const Date&) = default;

 private:
  std::chrono::sys_days days_{};
};

/// Date-indexed matrix with labelled columns. Rows are strictly increasing
/// dates, labels are unique.
class TimeSeriesPanel {
 public:
  TimeSeriesPanel() = default;
  TimeSeriesPanel(std::vector<Date> dates, std::vector<std::string> labels,
                  Eigen::MatrixXd values);

  [[nodiscard]] const std::vector<Date>& dates() const { return dates_; }
  [[nodiscard]] const std::vector<std::string>& labels() const { return labels_; }
  [[nodiscard]] const Eigen::MatrixXd& values() const { return values_; }
  [[nodiscard]] Eigen::Index rows() const { return values_.rows(); }
  [[nodiscard]] Eigen::Index cols() const { return values_.cols(); }
  [[nodiscard]] bool empty() const { return values_.size() == 0; }

  [[nodiscard]] std::optional<Eigen::Index> index_of(std::string_view label) const;
  [[nodiscard]] bool has(std::string_view label) const { return index_of(label).has_value(); }
  /// Column by label. Throws DataError if absent.
  [[nodiscard]] Eigen::VectorXd column(std::string_view label) const;

  [[nodiscard]] std::vector<Eigen::Index> rows_between(Date first, Date last_exclusive) const;

  friend bool operator==(const TimeSeriesPanel& a, const TimeSeriesPanel& b) {
    return a.dates_ == b.dates_ && a.labels_ == b.labels_ && a.values_ == b.values_;
  }

 protected:
  std::vector<Date> dates_;
  std::vector<std::string> labels_;
  Eigen::MatrixXd values_;
};

/// Adjusted close prices, strictly positive.
class PricePanel : public TimeSeriesPanel {
 public:
  PricePanel() = default;
  PricePanel(std::vector<Date> dates, std::vector<std::string> tickers,
             Eigen::MatrixXd values);
  [[nodiscard]] const std::vector<std::string>& tickers() const { return labels_; }
};

/// Daily log returns; row t is the return from date t-1 to date t of the
/// source price panel and carries date t.
class ReturnsPanel : public TimeSeriesPanel {
 public:
  using TimeSeriesPanel::TimeSeriesPanel;
  [[nodiscard]] const std::vector<std::string>& tickers() const { return labels_; }
  [[nodiscard]] ReturnsPanel select_rows(std::span<const Eigen::Index> rows) const;
  [[nodiscard]] ReturnsPanel select_columns(std::span<const std::string> tickers) const;
};

inline constexpr std::string_view kMktRf = "MKT_RF";
inline constexpr std::string_view kSmb = "SMB";
inline constexpr std::string_view kHml = "HML";
inline constexpr std::string_view kRmw = "RMW";
inline constexpr std::string_view kCma = "CMA";
inline constexpr std::string_view kRf = "RF";

/// Market factor returns (MKT_RF, SMB, HML, RMW, CMA, RF) plus any
/// constructed factor columns.
class FactorPanel : public TimeSeriesPanel {
 public:
  using TimeSeriesPanel::TimeSeriesPanel;
  [[nodiscard]] const std::vector<std::string>& columns() const { return labels_; }
  [[nodiscard]] FactorPanel select_rows(std::span<const Eigen::Index> rows) const;
  /// Appends a column; dates must match. Throws DataError on duplicates.
  [[nodiscard]] FactorPanel with_column(std::string name, const Eigen::VectorXd& series) const;
};

enum class FactorScale { Decimal, Percent };

/// The eleven GICS sectors.
enum class GicsSector {
  Financials,
  Industrials,
  HealthCare,
  InformationTechnology,
  ConsumerDiscretionary,
  ConsumerStaples,
  Utilities,
  RealEstate,
  Energy,
  Materials,
  CommunicationServices,
};

inline constexpr std::size_t kGicsSectorCount = 11;

/// Throws DataError("unknown GICS sector: ...").
GicsSector parse_sector(std::string_view label);
std::string_view to_string(GicsSector sector);

struct ScoreRecord {
  std::string ticker;
  std::optional<double> co2_scope1;
  std::optional<double> co2_scope2;
  std::optional<double> market_cap;
  std::optional<double> esg;
  std::optional<double> esg_promised;
  std::optional<double> esg_realized;
  std::optional<GicsSector> sector;
};

/// Cross-sectional sustainability snapshot keyed by ticker.
class ScoreTable {
 public:
  void insert(ScoreRecord record);
  [[nodiscard]] const ScoreRecord* find(std::string_view ticker) const;
  [[nodiscard]] const std::map<std::string, ScoreRecord, std::less<>>& records() const {
    return records_;
  }
  [[nodiscard]] std::size_t size() const { return records_.size(); }

 private:
  std::map<std::string, ScoreRecord, std::less<>> records_;
};

struct PriceLoad {
  PricePanel panel;
  std::size_t dropped_rows = 0;
};

/// Loads a price file (first column `date`, one column per ticker). Rows
/// with a missing or non-positive price are dropped and counted.
PriceLoad load_price_panel(const std::filesystem::path& path);

void write_price_panel(const PricePanel& panel, const std::filesystem::path& path);

/// Loads a factor file with the six canonical columns; extra columns are
/// kept. Rows with any missing cell are dropped.
FactorPanel load_factor_panel(const std::filesystem::path& path,
                              FactorScale scale = FactorScale::Decimal);

void write_panel(const TimeSeriesPanel& panel, const std::filesystem::path& path);

ReturnsPanel compute_log_returns(const PricePanel& panel);

struct AlignedPanels {
  ReturnsPanel returns;
  FactorPanel factors;
};

inline constexpr std::size_t kMinAlignedObservations = 30;

/// Restricts both panels to their common dates. Throws DataError when the
/// intersection is empty or shorter than `min_observations`.
AlignedPanels align(const ReturnsPanel& returns, const FactorPanel& factors,
                    std::size_t min_observations = kMinAlignedObservations);

/// Loads a score file. When the file has an `as_of` column, each ticker
/// takes its latest row dated on or before `as_of` (or its latest row when
/// `as_of` is not given).
ScoreTable load_scores(const std::filesystem::path& path,
                       std::optional<Date> as_of = std::nullopt);

void write_scores(const ScoreTable& table, const std::filesystem::path& path);

}  // namespace nethedge
