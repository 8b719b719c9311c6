#include "nethedge/data.hpp"

#include "nethedge/csv.hpp"
#include "nethedge/errors.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_set>

namespace nethedge {

using namespace std::chrono;

Date::Date(int y, unsigned m, unsigned d) {
  const year_month_day ymd{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
  if (!ymd.ok()) throw DataError("invalid calendar date");
  days_ = sys_days{ymd};
}

Date Date::parse(std::string_view text) {
  int y = 0;
  unsigned m = 0, d = 0;
  auto bad = [&] { return DataError("bad ISO-8601 date: '" + std::string(text) + "'"); };
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') throw bad();
  const char* s = text.data();
  if (std::from_chars(s, s + 4, y).ptr != s + 4) throw bad();
  if (std::from_chars(s + 5, s + 7, m).ptr != s + 7) throw bad();
  if (std::from_chars(s + 8, s + 10, d).ptr != s + 10) throw bad();
  const year_month_day ymd{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
  if (!ymd.ok()) throw bad();
  return Date(sys_days{ymd});
}

std::string Date::iso() const {
  const year_month_day ymd{days_};
  std::array<char, 16> buf{};
  std::snprintf(buf.data(), buf.size(), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf.data();
}

int Date::year() const { return static_cast<int>(year_month_day{days_}.year()); }

bool Date::is_weekday() const {
  const auto wd = std::chrono::weekday{days_}.c_encoding();
  return wd != 0 && wd != 6;
}

Date Date::plus_years(int n) const {
  year_month_day ymd{days_};
  ymd += std::chrono::years{n};
  if (!ymd.ok()) ymd = ymd.year() / ymd.month() / std::chrono::last;
  return Date(sys_days{ymd});
}

TimeSeriesPanel::TimeSeriesPanel(std::vector<Date> dates, std::vector<std::string> labels,
                                 Eigen::MatrixXd values)
    : dates_(std::move(dates)), labels_(std::move(labels)), values_(std::move(values)) {
  if (values_.rows() != static_cast<Eigen::Index>(dates_.size()) ||
      values_.cols() != static_cast<Eigen::Index>(labels_.size())) {
    throw DataError("panel shape does not match dates/labels");
  }
  for (std::size_t t = 1; t < dates_.size(); ++t) {
    if (dates_[t] == dates_[t - 1]) throw DataError("duplicate dates");
    if (dates_[t] < dates_[t - 1]) throw DataError("dates not increasing");
  }
  std::unordered_set<std::string> seen;
  for (const auto& l : labels_) {
    if (!seen.insert(l).second) throw DataError("duplicate column label: " + l);
  }
}

std::optional<Eigen::Index> TimeSeriesPanel::index_of(std::string_view label) const {
  const auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) return std::nullopt;
  return static_cast<Eigen::Index>(it - labels_.begin());
}

Eigen::VectorXd TimeSeriesPanel::column(std::string_view label) const {
  const auto idx = index_of(label);
  if (!idx) throw DataError("missing column: " + std::string(label));
  return values_.col(*idx);
}

std::vector<Eigen::Index> TimeSeriesPanel::rows_between(Date first, Date last_exclusive) const {
  std::vector<Eigen::Index> rows;
  for (std::size_t t = 0; t < dates_.size(); ++t) {
    if (dates_[t] >= first && dates_[t] < last_exclusive) rows.push_back(static_cast<Eigen::Index>(t));
  }
  return rows;
}

PricePanel::PricePanel(std::vector<Date> dates, std::vector<std::string> tickers,
                       Eigen::MatrixXd values)
    : TimeSeriesPanel(std::move(dates), std::move(tickers), std::move(values)) {
  if (!(values_.array() > 0.0).all()) throw DataError("prices must be strictly positive");
}

namespace {

template <typename Panel>
Panel take_rows(const TimeSeriesPanel& src, std::span<const Eigen::Index> rows) {
  std::vector<Date> dates;
  dates.reserve(rows.size());
  Eigen::MatrixXd values(static_cast<Eigen::Index>(rows.size()), src.cols());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    dates.push_back(src.dates()[static_cast<std::size_t>(rows[k])]);
    values.row(static_cast<Eigen::Index>(k)) = src.values().row(rows[k]);
  }
  return Panel(std::move(dates), src.labels(), std::move(values));
}

struct RawPanel {
  std::vector<Date> dates;
  std::vector<std::string> labels;
  std::vector<std::vector<double>> rows;
};

RawPanel read_raw_panel(const std::filesystem::path& path) {
  const auto table = csv::read(path);
  if (table.header.size() < 2) throw DataError(path.string() + ": need a date column and at least one series");
  RawPanel raw;
  raw.labels.assign(table.header.begin() + 1, table.header.end());
  std::vector<std::size_t> order(table.rows.size());
  std::vector<Date> dates;
  dates.reserve(table.rows.size());
  for (const auto& row : table.rows) dates.push_back(Date::parse(row[0]));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return dates[a] < dates[b]; });
  for (std::size_t k = 1; k < order.size(); ++k) {
    if (dates[order[k]] == dates[order[k - 1]]) throw DataError(path.string() + ": duplicate dates");
  }
  for (const auto i : order) {
    raw.dates.push_back(dates[i]);
    std::vector<double> values;
    values.reserve(raw.labels.size());
    for (std::size_t c = 1; c < table.rows[i].size(); ++c) values.push_back(csv::parse_number(table.rows[i][c]));
    raw.rows.push_back(std::move(values));
  }
  return raw;
}

std::string panel_to_text(const TimeSeriesPanel& panel) {
  std::ostringstream out;
  out << "date";
  for (const auto& l : panel.labels()) out << ',' << l;
  out << '\n';
  for (Eigen::Index t = 0; t < panel.rows(); ++t) {
    out << panel.dates()[static_cast<std::size_t>(t)].iso();
    for (Eigen::Index j = 0; j < panel.cols(); ++j) out << ',' << csv::format_number(panel.values()(t, j));
    out << '\n';
  }
  return out.str();
}

}  // namespace

ReturnsPanel ReturnsPanel::select_rows(std::span<const Eigen::Index> rows) const {
  return take_rows<ReturnsPanel>(*this, rows);
}

ReturnsPanel ReturnsPanel::select_columns(std::span<const std::string> tickers) const {
  Eigen::MatrixXd values(rows(), static_cast<Eigen::Index>(tickers.size()));
  for (std::size_t j = 0; j < tickers.size(); ++j) {
    values.col(static_cast<Eigen::Index>(j)) = column(tickers[j]);
  }
  return ReturnsPanel(dates_, std::vector<std::string>(tickers.begin(), tickers.end()), std::move(values));
}

FactorPanel FactorPanel::select_rows(std::span<const Eigen::Index> rows) const {
  return take_rows<FactorPanel>(*this, rows);
}

FactorPanel FactorPanel::with_column(std::string name, const Eigen::VectorXd& series) const {
  if (series.size() != rows()) throw DataError("factor column length mismatch: " + name);
  if (has(name)) throw DataError("duplicate factor column: " + name);
  Eigen::MatrixXd values(rows(), cols() + 1);
  values.leftCols(cols()) = values_;
  values.col(cols()) = series;
  auto labels = labels_;
  labels.push_back(std::move(name));
  return FactorPanel(dates_, std::move(labels), std::move(values));
}

namespace {

constexpr std::array<std::string_view, kGicsSectorCount> kSectorNames = {
    "Financials",
    "Industrials",
    "Health Care",
    "Information Technology",
    "Consumer Discretionary",
    "Consumer Staples",
    "Utilities",
    "Real Estate",
    "Energy",
    "Materials",
    "Communication Services",
};

}  // namespace

GicsSector parse_sector(std::string_view label) {
  for (std::size_t i = 0; i < kSectorNames.size(); ++i) {
    if (kSectorNames[i] == label) return static_cast<GicsSector>(i);
  }
  throw DataError("unknown GICS sector: '" + std::string(label) + "'");
}

std::string_view to_string(GicsSector sector) {
  return kSectorNames[static_cast<std::size_t>(sector)];
}

void ScoreTable::insert(ScoreRecord record) {
  if (record.market_cap && !(*record.market_cap > 0.0)) {
    throw DataError("non-positive market cap for " + record.ticker);
  }
  auto key = record.ticker;
  records_.insert_or_assign(std::move(key), std::move(record));
}

const ScoreRecord* ScoreTable::find(std::string_view ticker) const {
  const auto it = records_.find(ticker);
  return it == records_.end() ? nullptr : &it->second;
}

PriceLoad load_price_panel(const std::filesystem::path& path) {
  auto raw = read_raw_panel(path);
  std::vector<Date> dates;
  std::vector<const std::vector<double>*> kept;
  std::size_t dropped = 0;
  for (std::size_t t = 0; t < raw.rows.size(); ++t) {
    const auto& row = raw.rows[t];
    const bool usable = std::all_of(row.begin(), row.end(), [](double p) { return std::isfinite(p) && p > 0.0; });
    if (!usable) {
      ++dropped;
      continue;
    }
    dates.push_back(raw.dates[t]);
    kept.push_back(&row);
  }
  if (dropped > 0) {
    spdlog::warn("{}: dropped {} row(s) with missing or non-positive prices", path.string(), dropped);
  }
  if (kept.size() < 2) throw DataError(path.string() + ": fewer than 2 usable rows");
  Eigen::MatrixXd values(static_cast<Eigen::Index>(kept.size()), static_cast<Eigen::Index>(raw.labels.size()));
  for (std::size_t t = 0; t < kept.size(); ++t) {
    for (std::size_t j = 0; j < raw.labels.size(); ++j) {
      values(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j)) = (*kept[t])[j];
    }
  }
  return {PricePanel(std::move(dates), std::move(raw.labels), std::move(values)), dropped};
}

void write_price_panel(const PricePanel& panel, const std::filesystem::path& path) {
  csv::write_text(path, panel_to_text(panel));
}

void write_panel(const TimeSeriesPanel& panel, const std::filesystem::path& path) {
  csv::write_text(path, panel_to_text(panel));
}

FactorPanel load_factor_panel(const std::filesystem::path& path, FactorScale scale) {
  auto raw = read_raw_panel(path);
  for (const auto name : {kMktRf, kSmb, kHml, kRmw, kCma, kRf}) {
    if (std::find(raw.labels.begin(), raw.labels.end(), name) == raw.labels.end()) {
      throw DataError(path.string() + ": missing factor column " + std::string(name));
    }
  }
  const double factor = scale == FactorScale::Percent ? 0.01 : 1.0;
  std::vector<Date> dates;
  std::vector<std::size_t> kept;
  for (std::size_t t = 0; t < raw.rows.size(); ++t) {
    const auto& row = raw.rows[t];
    if (std::all_of(row.begin(), row.end(), [](double v) { return std::isfinite(v); })) {
      dates.push_back(raw.dates[t]);
      kept.push_back(t);
    }
  }
  if (kept.size() < raw.rows.size()) {
    spdlog::warn("{}: dropped {} factor row(s) with missing cells", path.string(), raw.rows.size() - kept.size());
  }
  Eigen::MatrixXd values(static_cast<Eigen::Index>(kept.size()), static_cast<Eigen::Index>(raw.labels.size()));
  for (std::size_t t = 0; t < kept.size(); ++t) {
    for (std::size_t j = 0; j < raw.labels.size(); ++j) {
      values(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j)) = raw.rows[kept[t]][j] * factor;
    }
  }
  return FactorPanel(std::move(dates), std::move(raw.labels), std::move(values));
}

ReturnsPanel compute_log_returns(const PricePanel& panel) {
  if (panel.rows() < 2) throw DataError("need at least 2 price dates");
  const auto& p = panel.values();
  const Eigen::Index n = p.rows() - 1;
  Eigen::MatrixXd r(n, p.cols());
  for (Eigen::Index j = 0; j < p.cols(); ++j) {
    for (Eigen::Index t = 0; t < n; ++t) r(t, j) = std::log(p(t + 1, j) / p(t, j));
  }
  std::vector<Date> dates(panel.dates().begin() + 1, panel.dates().end());
  return ReturnsPanel(std::move(dates), panel.tickers(), std::move(r));
}

AlignedPanels align(const ReturnsPanel& returns, const FactorPanel& factors, std::size_t min_observations) {
  if (returns.rows() == 0 || factors.rows() == 0) throw DataError("align: empty panel");
  std::vector<Eigen::Index> r_rows, f_rows;
  std::size_t i = 0, j = 0;
  const auto& rd = returns.dates();
  const auto& fd = factors.dates();
  while (i < rd.size() && j < fd.size()) {
    if (rd[i] < fd[j]) {
      ++i;
    } else if (fd[j] < rd[i]) {
      ++j;
    } else {
      r_rows.push_back(static_cast<Eigen::Index>(i++));
      f_rows.push_back(static_cast<Eigen::Index>(j++));
    }
  }
  if (r_rows.empty()) throw DataError("align: empty intersection");
  if (r_rows.size() < min_observations) {
    throw DataError("align: only " + std::to_string(r_rows.size()) + " common dates (need " +
                    std::to_string(min_observations) + ")");
  }
  return {returns.select_rows(r_rows), factors.select_rows(f_rows)};
}

namespace {

std::optional<double> optional_number(const std::vector<std::string>& row, int col) {
  if (col < 0) return std::nullopt;
  const double v = csv::parse_number(row[static_cast<std::size_t>(col)]);
  if (std::isnan(v)) return std::nullopt;
  return v;
}

}  // namespace

ScoreTable load_scores(const std::filesystem::path& path, std::optional<Date> as_of) {
  const auto table = csv::read(path);
  const int c_ticker = table.column("ticker");
  if (c_ticker < 0) throw DataError(path.string() + ": missing ticker column");
  const int c_s1 = table.column("co2_scope1");
  const int c_s2 = table.column("co2_scope2");
  const int c_mcap = table.column("market_cap");
  const int c_esg = table.column("esg");
  const int c_esgp = table.column("esg_promised");
  const int c_esgr = table.column("esg_realized");
  const int c_sector = table.column("sector");
  const int c_asof = table.column("as_of");

  std::map<std::string, std::pair<Date, ScoreRecord>> chosen;
  for (const auto& row : table.rows) {
    ScoreRecord rec;
    rec.ticker = row[static_cast<std::size_t>(c_ticker)];
    if (rec.ticker.empty()) throw DataError(path.string() + ": empty ticker");
    rec.co2_scope1 = optional_number(row, c_s1);
    rec.co2_scope2 = optional_number(row, c_s2);
    rec.market_cap = optional_number(row, c_mcap);
    rec.esg = optional_number(row, c_esg);
    rec.esg_promised = optional_number(row, c_esgp);
    rec.esg_realized = optional_number(row, c_esgr);
    if (c_sector >= 0 && !row[static_cast<std::size_t>(c_sector)].empty()) {
      rec.sector = parse_sector(row[static_cast<std::size_t>(c_sector)]);
    }
    if (rec.market_cap && *rec.market_cap < 0.0) throw DataError("negative market cap for " + rec.ticker);
    if (rec.market_cap && *rec.market_cap == 0.0) throw DataError("non-positive market cap for " + rec.ticker);
    for (const auto& s : {rec.co2_scope1, rec.co2_scope2}) {
      if (s && *s < 0.0) throw DataError("negative emission scope for " + rec.ticker);
    }

    Date stamp{};
    if (c_asof >= 0) {
      stamp = Date::parse(row[static_cast<std::size_t>(c_asof)]);
      if (as_of && stamp > *as_of) continue;
    }
    auto it = chosen.find(rec.ticker);
    if (it == chosen.end()) {
      auto key = rec.ticker;
      chosen.emplace(std::move(key), std::make_pair(stamp, std::move(rec)));
    } else if (c_asof < 0) {
      throw DataError(path.string() + ": duplicate ticker " + rec.ticker);
    } else if (stamp == it->second.first) {
      throw DataError(path.string() + ": duplicate snapshot for " + rec.ticker);
    } else if (stamp > it->second.first) {
      it->second = {stamp, std::move(rec)};
    }
  }
  ScoreTable out;
  for (auto& [ticker, entry] : chosen) out.insert(std::move(entry.second));
  return out;
}

void write_scores(const ScoreTable& table, const std::filesystem::path& path) {
  std::ostringstream out;
  out << "ticker,co2_scope1,co2_scope2,market_cap,esg,esg_promised,esg_realized,sector\n";
  auto num = [](const std::optional<double>& v) { return v ? csv::format_number(*v) : std::string(); };
  for (const auto& [ticker, r] : table.records()) {
    out << ticker << ',' << num(r.co2_scope1) << ',' << num(r.co2_scope2) << ',' << num(r.market_cap) << ','
        << num(r.esg) << ',' << num(r.esg_promised) << ',' << num(r.esg_realized) << ','
        << (r.sector ? std::string(to_string(*r.sector)) : std::string()) << '\n';
  }
  csv::write_text(path, out.str());
}

}  // namespace nethedge
