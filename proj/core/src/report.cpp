#include "nethedge/report.hpp"

#include "nethedge/csv.hpp"
#include "nethedge/errors.hpp"
#include "nethedge/factors.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace nethedge {

namespace {

std::string num(double v) { return csv::format_number(v); }

std::string fixed(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

std::size_t to_size(const std::string& s) { return static_cast<std::size_t>(csv::parse_number(s)); }

}  // namespace

std::string regressions_to_csv(const std::vector<FactorRegressions>& regressions) {
  std::ostringstream out;
  out << "factor,grid,block,base_label,extended_label,portfolio,model,term,estimate,hac_se,t_stat,p_value,stars,"
         "r_squared,adj_r_squared,n_obs,lag\n";
  for (const auto& fr : regressions) {
    for (std::size_t g = 0; g < fr.grids.size(); ++g) {
      const auto& grid = fr.grids[g];
      for (const auto& [block, results] : {std::pair{"base", &grid.base}, std::pair{"extended", &grid.extended}}) {
        for (const auto& r : *results) {
          for (const auto& c : r.coefficients) {
            out << fr.factor << ',' << g << ',' << block << ',' << grid.base_label << ',' << grid.extended_label << ','
                << r.portfolio << ',' << r.model << ',' << c.term << ',' << num(c.estimate) << ',' << num(c.hac_se)
                << ',' << num(c.t_stat) << ',' << num(c.p_value) << ',' << c.stars << ',' << num(r.r_squared) << ','
                << num(r.adj_r_squared) << ',' << r.n_obs << ',' << r.lag_used << '\n';
          }
        }
      }
    }
  }
  return out.str();
}

std::vector<FactorRegressions> regressions_from_csv(const std::filesystem::path& path) {
  const auto table = csv::read(path);
  const char* names[] = {"factor", "grid", "block", "base_label", "extended_label", "portfolio", "model", "term",
                         "estimate", "hac_se", "t_stat", "p_value", "stars", "r_squared", "adj_r_squared", "n_obs",
                         "lag"};
  std::array<std::size_t, 17> col{};
  for (std::size_t i = 0; i < col.size(); ++i) {
    const int c = table.column(names[i]);
    if (c < 0) throw DataError(path.string() + ": missing column " + names[i]);
    col[i] = static_cast<std::size_t>(c);
  }
  std::vector<FactorRegressions> out;
  for (const auto& row : table.rows) {
    const auto& factor = row[col[0]];
    if (out.empty() || out.back().factor != factor) out.push_back({factor, {}});
    auto& fr = out.back();
    const auto g = to_size(row[col[1]]);
    if (fr.grids.size() <= g) fr.grids.resize(g + 1);
    auto& grid = fr.grids[g];
    grid.base_label = row[col[3]];
    grid.extended_label = row[col[4]];
    auto& results = row[col[2]] == "base" ? grid.base : grid.extended;
    const auto& portfolio = row[col[5]];
    if (row[col[2]] == "base" && std::find(grid.portfolios.begin(), grid.portfolios.end(), portfolio) == grid.portfolios.end()) {
      grid.portfolios.push_back(portfolio);
    }
    if (results.empty() || results.back().portfolio != portfolio) {
      RegressionResult r;
      r.portfolio = portfolio;
      r.model = row[col[6]];
      r.r_squared = csv::parse_number(row[col[13]]);
      r.adj_r_squared = csv::parse_number(row[col[14]]);
      r.n_obs = to_size(row[col[15]]);
      r.lag_used = static_cast<int>(csv::parse_number(row[col[16]]));
      results.push_back(std::move(r));
    }
    Coefficient c;
    c.term = row[col[7]];
    c.estimate = csv::parse_number(row[col[8]]);
    c.hac_se = csv::parse_number(row[col[9]]);
    c.t_stat = csv::parse_number(row[col[10]]);
    c.p_value = csv::parse_number(row[col[11]]);
    c.stars = row[col[12]];
    results.back().coefficients.push_back(std::move(c));
  }
  return out;
}

std::string metrics_to_csv(const std::vector<FactorMetrics>& metrics) {
  std::ostringstream out;
  out << "factor,portfolio,sharpe,sortino,omega,mdd,var5\n";
  for (const auto& fm : metrics) {
    for (std::size_t i = 0; i < fm.portfolios.size(); ++i) {
      const auto& r = fm.reports[i];
      out << fm.factor << ',' << fm.portfolios[i] << ',' << num(r.sharpe) << ',' << num(r.sortino) << ','
          << num(r.omega) << ',' << num(r.mdd) << ',' << num(r.var5) << '\n';
    }
  }
  return out.str();
}

std::vector<FactorMetrics> metrics_from_csv(const std::filesystem::path& path) {
  const auto table = csv::read(path);
  const char* names[] = {"factor", "portfolio", "sharpe", "sortino", "omega", "mdd", "var5"};
  std::array<std::size_t, 7> col{};
  for (std::size_t i = 0; i < col.size(); ++i) {
    const int c = table.column(names[i]);
    if (c < 0) throw DataError(path.string() + ": missing column " + names[i]);
    col[i] = static_cast<std::size_t>(c);
  }
  std::vector<FactorMetrics> out;
  for (const auto& row : table.rows) {
    if (out.empty() || out.back().factor != row[col[0]]) out.push_back({row[col[0]], {}, {}});
    out.back().portfolios.push_back(row[col[1]]);
    out.back().reports.push_back({csv::parse_number(row[col[2]]), csv::parse_number(row[col[3]]),
                                  csv::parse_number(row[col[4]]), csv::parse_number(row[col[5]]),
                                  csv::parse_number(row[col[6]])});
  }
  return out;
}

std::string render_report(const std::vector<FactorRegressions>& regressions, const std::vector<FactorMetrics>& metrics) {
  std::ostringstream out;
  for (const auto& fr : regressions) {
    for (const auto& grid : fr.grids) {
      out << "== " << fr.factor << ": " << grid.base_label << " vs " << grid.extended_label
          << " (HAC standard errors in parentheses; * 10%, ** 5%, *** 1%)\n";
      out << format_table(grid) << '\n';
    }
  }
  for (const auto& fm : metrics) {
    out << "== " << fm.factor << ": performance\n";
    out << format_metrics_table(fm.portfolios, fm.reports) << '\n';
  }
  return out.str();
}

std::string render_report_from_artifacts(const std::filesystem::path& run_dir) {
  return render_report(regressions_from_csv(run_dir / "regressions.csv"), metrics_from_csv(run_dir / "metrics.csv"));
}

namespace {

struct SectorRow {
  GicsSector sector;
  std::size_t count = 0;
  double mcap = 0.0;
  std::array<double, 4> sum{};
  std::array<std::size_t, 4> n{};
};

std::vector<SectorRow> sector_rows(const ScoreTable& scores, const std::vector<std::string>& universe, double& total_mcap) {
  std::map<GicsSector, SectorRow> rows;
  total_mcap = 0.0;
  for (const auto& t : universe) {
    const auto* rec = scores.find(t);
    if (!rec || !rec->sector) continue;
    auto& row = rows[*rec->sector];
    row.sector = *rec->sector;
    ++row.count;
    if (rec->market_cap) {
      row.mcap += *rec->market_cap;
      total_mcap += *rec->market_cap;
    }
    std::array<std::optional<double>, 4> vals{};
    if (rec->co2_scope1 && rec->co2_scope2 && rec->market_cap) {
      vals[0] = weighted_emission(*rec->co2_scope1, *rec->co2_scope2, *rec->market_cap);
    }
    vals[1] = rec->esg;
    vals[2] = rec->esg_promised;
    vals[3] = rec->esg_realized;
    for (std::size_t k = 0; k < 4; ++k) {
      if (vals[k]) {
        row.sum[k] += *vals[k];
        ++row.n[k];
      }
    }
  }
  std::vector<SectorRow> out;
  for (auto& [s, r] : rows) out.push_back(r);
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.count > b.count; });
  return out;
}

double avg(const SectorRow& r, std::size_t k) {
  return r.n[k] ? r.sum[k] / static_cast<double>(r.n[k]) : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

std::string sector_summary_csv(const ScoreTable& scores, const std::vector<std::string>& universe) {
  double total = 0.0;
  const auto rows = sector_rows(scores, universe, total);
  std::ostringstream out;
  out << "sector,n_stocks,market_cap,market_cap_share,co2_intensity,esg,esg_promised,esg_realized\n";
  for (const auto& r : rows) {
    out << to_string(r.sector) << ',' << r.count << ',' << num(r.mcap) << ',' << num(total > 0 ? r.mcap / total : 0.0)
        << ',' << num(avg(r, 0)) << ',' << num(avg(r, 1)) << ',' << num(avg(r, 2)) << ',' << num(avg(r, 3)) << '\n';
  }
  return out.str();
}

std::string sector_summary_table(const ScoreTable& scores, const std::vector<std::string>& universe) {
  double total = 0.0;
  const auto rows = sector_rows(scores, universe, total);
  std::vector<std::vector<std::string>> cells{
      {"GICS Sector", "#Stocks", "Market Cap", "CO2 [t/$]", "ESG", "ESGp", "ESGr"}};
  std::size_t count = 0;
  for (const auto& r : rows) {
    count += r.count;
    cells.push_back({std::string(to_string(r.sector)), std::to_string(r.count),
                     fixed("%.3g", r.mcap) + " (" + fixed("%.1f", total > 0 ? 100.0 * r.mcap / total : 0.0) + "%)",
                     fixed("%.3g", avg(r, 0)), fixed("%.1f", avg(r, 1)), fixed("%.1f", avg(r, 2)),
                     fixed("%.1f", avg(r, 3))});
  }
  cells.push_back({"Total", std::to_string(count), fixed("%.3g", total), "-", "-", "-", "-"});
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

namespace {

// Eleven distinguishable non-red colours, one per GICS sector.
constexpr std::array<const char*, kGicsSectorCount> kSectorColours = {
    "#1f77b4", "#8c564b", "#2ca02c", "#9467bd", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf", "#ff7f0e", "#393b79", "#637939"};

std::string escape_xml(const std::string& s) {
  std::string out;
  for (const char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

EmbeddingMap render_embedding_map(const EmbeddingSpace& space, const std::vector<NodeAttributes>& attributes,
                                  const std::string& title) {
  if (space.dimension() < 2) throw DataError("embedding map needs at least two dimensions");
  EmbeddingMap map;
  map.projected = space.dimension() > 2;

  constexpr double size = 800.0, margin = 60.0;
  const Eigen::Index n = space.vectors.rows();
  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  if (n > 0) {
    xmin = space.vectors.col(0).minCoeff();
    xmax = space.vectors.col(0).maxCoeff();
    ymin = space.vectors.col(1).minCoeff();
    ymax = space.vectors.col(1).maxCoeff();
  }
  const double span = std::max({xmax - xmin, ymax - ymin, 1e-12});
  auto px = [&](double x) { return margin + (x - xmin) / span * (size - 2 * margin); };
  auto py = [&](double y) { return size - margin - (y - ymin) / span * (size - 2 * margin); };

  std::map<std::string, const NodeAttributes*> attr;
  for (const auto& a : attributes) attr[a.node] = &a;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size + 220 << "\" height=\"" << size
      << "\" viewBox=\"0 0 " << size + 220 << ' ' << size << "\">\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"" << size + 220 << "\" height=\"" << size << "\" fill=\"white\"/>\n";
  svg << "<text x=\"" << margin << "\" y=\"30\" font-family=\"sans-serif\" font-size=\"18\">" << escape_xml(title)
      << "</text>\n";

  std::vector<Eigen::Index> factors;
  std::array<bool, kGicsSectorCount> used{};
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& label = space.labels[static_cast<std::size_t>(i)];
    const auto it = attr.find(label);
    const NodeAttributes* a = it == attr.end() ? nullptr : it->second;
    if (a && a->kind == NodeKind::Factor) {
      factors.push_back(i);
      continue;
    }
    const char* colour = "#999999";
    if (a && a->sector) {
      colour = kSectorColours[static_cast<std::size_t>(*a->sector)];
      used[static_cast<std::size_t>(*a->sector)] = true;
    }
    svg << "<circle cx=\"" << fixed("%.2f", px(space.vectors(i, 0))) << "\" cy=\"" << fixed("%.2f", py(space.vectors(i, 1)))
        << "\" r=\"4\" fill=\"" << colour << "\" fill-opacity=\"0.8\"><title>" << escape_xml(label)
        << "</title></circle>\n";
  }
  // Factors drawn last so they sit on top.
  for (const auto i : factors) {
    const auto& label = space.labels[static_cast<std::size_t>(i)];
    const double x = px(space.vectors(i, 0)), y = py(space.vectors(i, 1));
    svg << "<circle cx=\"" << fixed("%.2f", x) << "\" cy=\"" << fixed("%.2f", y)
        << "\" r=\"7\" fill=\"red\" stroke=\"black\" class=\"factor\"><title>" << escape_xml(label) << "</title></circle>\n";
    svg << "<text x=\"" << fixed("%.2f", x + 9) << "\" y=\"" << fixed("%.2f", y - 9)
        << "\" font-family=\"sans-serif\" font-size=\"14\" font-weight=\"bold\" fill=\"red\">" << escape_xml(label)
        << "</text>\n";
  }
  double ly = margin;
  for (std::size_t s = 0; s < kGicsSectorCount; ++s) {
    if (!used[s]) continue;
    svg << "<rect x=\"" << size + 10 << "\" y=\"" << ly - 10 << "\" width=\"12\" height=\"12\" fill=\"" << kSectorColours[s]
        << "\"/>\n";
    svg << "<text x=\"" << size + 28 << "\" y=\"" << ly << "\" font-family=\"sans-serif\" font-size=\"12\">"
        << escape_xml(std::string(to_string(static_cast<GicsSector>(s)))) << "</text>\n";
    ly += 20;
  }
  svg << "</svg>\n";
  map.svg = svg.str();
  return map;
}

EmbeddingMap emit_embedding_map(const EmbeddingSpace& space, const std::vector<NodeAttributes>& attributes,
                                const std::filesystem::path& dir, const std::string& stem, const std::string& title) {
  auto map = render_embedding_map(space, attributes, title);
  if (map.projected) {
    spdlog::warn("embedding has {} dimensions; the map shows the first two", space.dimension());
  }
  csv::write_text(dir / (stem + ".svg"), map.svg);
  write_embedding(space, attributes, dir / (stem + ".csv"));
  return map;
}

}  // namespace nethedge
