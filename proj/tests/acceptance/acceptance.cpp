// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include "econometrics_checks.hpp"
#include "node2vec_checks.hpp"
#include "tmfg_oracle.hpp"

#include <nethedge/csv.hpp>
#include <nethedge/errors.hpp>
#include <nethedge/metrics.hpp>
#include <nethedge/pipeline.hpp>

#include <spdlog/spdlog.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace nethedge;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Collects failures; the first few messages end up in the detail text.
struct Checker {
  bool ok = true;
  std::vector<std::string> failures;
  void require(bool cond, const std::string& what) {
    if (cond) return;
    ok = false;
    if (failures.size() < 3) failures.push_back(what);
  }
  [[nodiscard]] std::string failures_text() const {
    std::string s;
    for (const auto& f : failures) s += (s.empty() ? "" : "; ") + f;
    return s;
  }
};

std::string text(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

CorrelationMatrix labelled(const Eigen::MatrixXd& c) {
  CorrelationMatrix m;
  for (Eigen::Index i = 0; i < c.rows(); ++i) m.labels.push_back("v" + std::to_string(i));
  m.values = c;
  return m;
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / "nethedge-acceptance" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

Outcome tmfg_suite() {
  Checker c;
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> size(4, 120);
  const GainTransform gains[] = {GainTransform::Raw, GainTransform::Absolute, GainTransform::Square};
  for (int rep = 0; rep < 200; ++rep) {
    const int n = rep == 0 ? 4 : rep == 1 ? 120 : size(rng);
    const auto corr = testing::random_correlation(n, 2 * n + 20, rng);
    const auto gain = gains[rep % 3];
    const auto fg = tmfg(labelled(corr), gain);
    const auto audit = testing::audit_tmfg(fg, corr, gain);
    c.require(audit.empty(), text("n=%d: %s", n, audit.c_str()));
  }
  int oracle_cases = 0;
  for (int rep = 0; rep < 200; ++rep) {
    const auto corr = testing::random_correlation(6, 40, rng);
    for (auto gain : gains) {
      const auto fg = tmfg(labelled(corr), gain);
      const Eigen::MatrixXd g = gain_matrix(corr, gain);
      const auto seed = testing::oracle_seed(g);
      const auto oracle = testing::oracle_tmfg(g, seed);
      bool same = fg.seed == seed && oracle.edges == testing::edge_set(fg.graph) &&
                  oracle.insertions.size() == fg.insertions.size();
      for (std::size_t i = 0; same && i < oracle.insertions.size(); ++i) {
        same = oracle.insertions[i].vertex == fg.insertions[i].vertex && oracle.insertions[i].face == fg.insertions[i].face;
      }
      c.require(same, text("n=6 rep %d differs from exhaustive greedy", rep));
      ++oracle_cases;
    }
  }
  return {c.ok, c.ok ? text("200 random matrices (n in 4..120) audited; %d n=6 cases equal the oracle", oracle_cases)
                     : c.failures_text()};
}

Outcome node2vec_suite() {
  Checker c;
  const auto fd = testing::sgns_gradient_check(1000, 11);
  c.require(fd.max_relative_error < 1e-5, text("gradient rel error %.3g", fd.max_relative_error));

  struct Topology {
    const char* name;
    WeightedGraph graph;
    WalkConfig config;
  };
  std::vector<Topology> topologies;
  {
    WalkConfig w;
    w.p = 0.5;
    w.q = 2.0;
    w.num_walks = 200;
    w.walk_length = 40;
    w.seed = 5;
    topologies.push_back({"barbell", testing::barbell(5), w});
    w.p = 4.0;
    w.q = 0.25;
    w.seed = 6;
    topologies.push_back({"weighted grid", testing::weighted_grid(), w});
    w.p = 1.0;
    w.q = 0.5;
    w.num_walks = 100;
    w.seed = 7;
    topologies.push_back({"random TMFG", testing::random_tmfg(30, 8), w});
  }
  std::string chi_text;
  for (const auto& t : topologies) {
    const WalkGraph wg(t.graph, t.config.weight);
    const auto chi = testing::transition_chi_square(wg, t.config, 4);
    c.require(chi.dof > 0 && chi.pass(), text("%s chi2 %.1f > %.1f (dof %d)", t.name, chi.statistic, chi.critical, chi.dof));
    chi_text += text(" %s %.0f/%.0f", t.name, chi.statistic, chi.critical);
  }

  int separated = 0;
  for (int seed = 1; seed <= 100; ++seed) {
    const auto s = testing::clique_separation(static_cast<std::uint64_t>(seed));
    separated += s.intra < s.inter;
  }
  c.require(separated >= 95, text("two cliques separated in %d/100 seeds", separated));
  return {c.ok, c.ok ? text("FD rel error %.2g; chi2 stat/crit:%s; cliques %d/100", fd.max_relative_error, chi_text.c_str(),
                           separated)
                     : c.failures_text()};
}

Outcome econometrics_suite() {
  Checker c;
  std::mt19937_64 rng(31);
  const int t = 400;
  Eigen::MatrixXd x(t, 3);
  x.col(0).setOnes();
  x.col(1) = testing::ar1(t, 0.3, rng);
  x.col(2) = testing::ar1(t, 0.0, rng);
  Eigen::VectorXd e = testing::ar1(t, 0.2, rng);
  e.array() *= (1.0 + x.col(1).array().abs());
  const double white_gap = (newey_west_cov(x, e, 0) - testing::white_cov(x, e)).cwiseAbs().maxCoeff();
  c.require(white_gap <= 1e-10, text("lag-0 vs White max gap %.3g", white_gap));

  const auto hac = testing::hac_experiment(500, 5000, 0.5, 0.5, 77);
  c.require(hac.coverage >= 0.92 && hac.coverage <= 0.98, text("HAC coverage %.3f", hac.coverage));

  const int n = 1000;
  std::vector<Date> dates;
  for (Date d(2015, 1, 1); dates.size() < static_cast<std::size_t>(n); d = d.plus_days(1))
    if (d.is_weekday()) dates.push_back(d);
  Eigen::MatrixXd f(n, 6);
  std::normal_distribution<double> z(0.0, 0.01);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < 5; ++j) f(i, j) = z(rng);
    f(i, 5) = 0.0001;
  }
  const FactorPanel panel(dates, {"MKT_RF", "SMB", "HML", "RMW", "CMA", "RF"}, f);
  const Eigen::VectorXd y = f.col(0) + f.col(5);  // excess return equals the market
  const auto capm = run_model({ModelName::CAPM, std::nullopt}, "exact", y, false, panel);
  const double beta_gap = std::abs(capm.find("MKT_RF")->estimate - 1.0);
  const double alpha_gap = std::abs(capm.find("alpha")->estimate);
  const double r2_gap = std::abs(capm.r_squared - 1.0);
  c.require(beta_gap <= 1e-10 && alpha_gap <= 1e-10 && r2_gap <= 1e-10,
            text("CAPM gaps beta %.2g alpha %.2g R2 %.2g", beta_gap, alpha_gap, r2_gap));
  return {c.ok, c.ok ? text("White gap %.2g; AR(1) HAC coverage %.3f (500 reps, T=5000); exact CAPM recovered", white_gap,
                           hac.coverage)
                     : c.failures_text()};
}

double mdd_oracle(const std::vector<double>& r) {
  std::vector<double> wealth{1.0};
  double cum = 0.0;
  for (double x : r) wealth.push_back(std::exp(cum += x));
  double worst = 0.0;
  for (std::size_t i = 0; i < wealth.size(); ++i)
    for (std::size_t j = i + 1; j < wealth.size(); ++j) worst = std::max(worst, 1.0 - wealth[j] / wealth[i]);
  return worst;
}

bool throws_with(const std::function<void()>& f, const std::string& text) {
  try {
    f();
  } catch (const Error& e) {
    return std::string(e.what()).find(text) != std::string::npos;
  }
  return false;
}

Outcome metrics_suite() {
  Checker c;
  using V = std::vector<double>;
  auto near = [&](double a, double b, const char* what) {
    c.require(std::abs(a - b) <= 1e-12, text("%s: %.15g vs %.15g", what, a, b));
  };
  near(sharpe(V{0.01, -0.01, 0.01, -0.01}, V(4, 0.0)), 0.0, "sharpe zero mean");
  {
    // 0.1% excess plus an alternating 0.1% perturbation.
    const V r{0.002, 0.0, 0.002, 0.0};
    near(sharpe(r, V(4, 0.0), false), 0.001 / std::sqrt(4e-6 / 3.0), "sharpe daily");
    near(sharpe(r, V(4, 0.0)), 0.001 / std::sqrt(4e-6 / 3.0) * std::sqrt(252.0), "sharpe annualized");
  }
  c.require(throws_with([] { (void)sharpe(V(10, 0.001), V(10, 0.0)); }, "zero variance"), "sharpe zero variance error");
  near(sortino(V{0.02, -0.01}, V(2, 0.0), false), 0.005 / std::sqrt(0.0001 / 2.0), "sortino");
  near(sortino(V{-0.01, -0.02, -0.03}, V(3, 0.0), false), -0.02 / std::sqrt(14e-4 / 3.0), "sortino no upside");
  c.require(throws_with([] { (void)sortino(V{0.01, 0.02}, V(2, 0.0)); }, "no downside"), "sortino no downside error");
  near(omega(V{0.01, -0.01}), 1.0, "omega symmetric");
  near(omega(V{0.02, -0.01}), 2.0, "omega ratio");
  near(max_drawdown(V{std::log(2.0), std::log(0.5)}), 0.5, "mdd peak-to-trough");
  near(max_drawdown(V{0.01, 0.02, 0.0, 0.03}), 0.0, "mdd monotone");
  {
    // -1%, -0.99%, ..., 0%: the 5th percentile lands on the sixth order statistic.
    V grid;
    for (int i = 0; i <= 100; ++i) grid.push_back(-0.01 + 0.0001 * i);
    near(value_at_risk(grid), -grid[5], "var grid");
  }
  {
    V pos(40);
    for (int i = 0; i < 40; ++i) pos[static_cast<std::size_t>(i)] = 0.001 * (i + 1);
    near(value_at_risk(pos), -percentile_inclusive(pos, 0.05), "var sign convention");
    c.require(value_at_risk(pos) < 0.0, "var of positive returns should be negative");
  }
  std::mt19937_64 rng(41);
  {
    std::normal_distribution<double> z(0.0, 0.02);
    V r(100000);
    for (auto& x : r) x = z(rng);
    const double v = value_at_risk(r);
    const double expected = 1.6448536269514722 * 0.02;
    c.require(std::abs(v - expected) / expected <= 0.05, text("gaussian VaR %.5f", v));
  }
  int mdd_ok = 0;
  for (int s = 0; s < 100; ++s) {
    std::normal_distribution<double> z(0.0002, 0.015);
    V r(1000);
    for (auto& x : r) x = z(rng);
    const double a = max_drawdown(r), b = mdd_oracle(r);
    mdd_ok += std::abs(a - b) <= 1e-12;
  }
  c.require(mdd_ok == 100, text("mdd matches oracle on %d/100 series", mdd_ok));
  return {c.ok, c.ok ? "hand examples to 1e-12; Gaussian VaR within 5%; mdd equals oracle on 100 series"
                     : c.failures_text()};
}

// Embedding dimension for the end-to-end criteria; 0 keeps the default.
int g_dimension = 0;

PipelineConfig planted_config(std::uint64_t seed) {
  PipelineConfig c;
  if (g_dimension > 0) c.sgns.dimension = g_dimension;
  SyntheticMarketSpec s;
  s.n_stocks = 200;
  s.n_sectors = 8;
  s.planted_loading = 0.5;
  s.days = 1500;
  s.seed = seed;
  c.synthetic = s;
  c.start = s.start;
  c.end = Date(2030, 12, 31);
  c.factor_list = {std::string(kCo2Factor)};
  c.models = {ModelName::FF3};
  set_all_seeds(c, seed);
  return c;
}

Outcome planted_cluster() {
  Checker c;
  int cluster_ok = 0, signs_ok = 0, r2_ok = 0;
  std::string per_seed;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto config = planted_config(seed);
    const auto data = load_market_data(config);
    const auto res = analyze(config, data, config.start, config.end.plus_days(1), "planted");
    const auto& a = res.analyses.at(0);
    int planted = 0;
    for (std::size_t i = 0; i < 30 && i < a.ranking.size(); ++i) {
      const auto* rec = data.scores.find(a.ranking[i].node);
      planted += rec && rec->sector == config.synthetic->planted_sector;
    }
    cluster_ok += planted >= 24;

    const auto& grid = a.regressions.grids.at(0);
    const RegressionResult *close = nullptr, *far_close = nullptr, *close_base = nullptr;
    for (std::size_t i = 0; i < grid.portfolios.size(); ++i) {
      if (grid.portfolios[i] == "close") {
        close = &grid.extended[i];
        close_base = &grid.base[i];
      }
      if (grid.portfolios[i] == "far-close") far_close = &grid.extended[i];
    }
    const auto* bc = close->find(kCo2Factor);
    const auto* bf = far_close->find(kCo2Factor);
    const bool signs = bc->estimate > 0 && bc->p_value < 0.05 && bf->estimate < 0 && bf->p_value < 0.05;
    signs_ok += signs;
    const bool r2 = close->r_squared > close_base->r_squared && close->adj_r_squared > close_base->adj_r_squared;
    r2_ok += r2;
    per_seed += text(" [%d: %d/30 %+.2f/%+.2f R2 %.3f->%.3f]", static_cast<int>(seed), planted, bc->estimate, bf->estimate,
                    close_base->r_squared, close->r_squared);
  }
  c.require(cluster_ok >= 9, text("(a) planted-sector share >= 80%% in %d/10 seeds", cluster_ok));
  c.require(signs_ok >= 9, text("(b) significant signs in %d/10 seeds", signs_ok));
  c.require(r2_ok == 10, text("(c) R2 increased in %d/10 seeds", r2_ok));
  return {c.ok, (c.ok ? text("(a) %d/10 (b) %d/10 (c) %d/10", cluster_ok, signs_ok, r2_ok) : c.failures_text()) + ";" + per_seed};
}

Outcome expanding_stability() {
  auto config = planted_config(21);
  config.end = Date(2020, 12, 31);
  config.threads = 4;
  config.out_dir = scratch("windows");
  const auto res = run_expanding_windows(config);
  std::set<std::string> sectors;
  std::string seq;
  for (const auto& s : res.summary) {
    const std::string name = s.nearest_sector ? std::string(to_string(*s.nearest_sector)) : "none";
    sectors.insert(name);
    seq += (seq.empty() ? "" : ", ") + s.window + ":" + name;
  }
  const bool ok = res.summary.size() >= 2 && sectors.size() == 1 && *sectors.begin() != "none";
  return {ok, text("%zu windows: %s", res.summary.size(), seq.c_str())};
}

std::map<std::string, std::string> directory_bytes(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file()) out[e.path().filename().string()] = csv::read_text(e.path());
  return out;
}

Outcome determinism() {
  const auto root = scratch("determinism");
  auto config = planted_config(5);
  config.factor_list = {std::string(kCo2Factor), std::string(kEsgFactor)};
  config.models = {ModelName::CAPM, ModelName::FF3, ModelName::FF5};
  config.out_dir = root / "seed";
  run_pipeline(config);
  std::vector<std::map<std::string, std::string>> runs;
  for (const char* name : {"a", "b"}) {
    auto again = load_config(root / "seed" / "manifest.json");
    again.threads = 1;
    again.out_dir = root / name;
    run_pipeline(again);
    runs.push_back(directory_bytes(root / name));
  }
  const bool ok = runs[0] == runs[1] && runs[0].size() > 5 && runs[0] == directory_bytes(root / "seed");
  return {ok, text("%zu artifacts compared byte for byte", runs[0].size())};
}

struct Criterion {
  const char* name;
  double budget_seconds;
  Outcome (*run)();
};

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_level(spdlog::level::err);
  const Criterion criteria[] = {
      {"TMFG structure", 30.0, tmfg_suite},
      {"node2vec correctness", 120.0, node2vec_suite},
      {"econometrics", 0.0, econometrics_suite},
      {"metrics", 0.0, metrics_suite},
      {"planted cluster", 300.0, planted_cluster},
      {"expanding-window stability", 0.0, expanding_stability},
      {"determinism", 0.0, determinism},
  };
  // Usage: nethedge_acceptance [criterion] [--dim D]
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--dim" && i + 1 < argc) {
      g_dimension = std::atoi(argv[++i]);
    } else {
      only = std::atoi(arg.c_str());
    }
  }
  if (g_dimension > 0) std::printf("note: embedding dimension overridden to %d for criteria 5-7\n", g_dimension);
  int failed = 0;
  for (int i = 0; i < 7; ++i) {
    if (only && only != i + 1) continue;
    const auto& cr = criteria[i];
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = cr.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (cr.budget_seconds > 0 && secs > cr.budget_seconds) {
      o.pass = false;
      o.detail += text(" (over the %.0f s budget)", cr.budget_seconds);
    }
    std::printf("%s criterion %d (%s): %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", i + 1, cr.name, o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed ? 1 : 0;
}
