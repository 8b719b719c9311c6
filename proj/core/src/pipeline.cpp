#include "nethedge/pipeline.hpp"

#include "nethedge/csv.hpp"
#include "nethedge/errors.hpp"
#include "nethedge/metrics.hpp"
#include "nethedge/ols.hpp"

#include <json.hpp>
#include <openssl/evp.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cstdio>
#include <exception>
#include <functional>
#include <limits>
#include <sstream>
#include <thread>

namespace nethedge {

using json = nlohmann::json;

namespace {

int exit_code_for(const Error& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return 2;
  if (dynamic_cast<const NumericalError*>(&e)) return 4;
  if (const auto* s = dynamic_cast<const StageError*>(&e)) return s->exit_code();
  return 3;
}

template <typename F>
auto stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(name, e);
  }
}

std::string factor_scale_name(FactorScale s) { return s == FactorScale::Percent ? "percent" : "decimal"; }

FactorScale parse_factor_scale(const std::string& s) {
  if (s == "decimal") return FactorScale::Decimal;
  if (s == "percent") return FactorScale::Percent;
  throw ConfigError("factor scale must be percent or decimal");
}

std::string excess_name(ExcessReturn e) {
  switch (e) {
    case ExcessReturn::Auto: return "auto";
    case ExcessReturn::Always: return "always";
    case ExcessReturn::Never: return "never";
  }
  return "auto";
}

ExcessReturn parse_excess(const std::string& s) {
  if (s == "auto") return ExcessReturn::Auto;
  if (s == "always") return ExcessReturn::Always;
  if (s == "never") return ExcessReturn::Never;
  throw ConfigError("excess must be auto, always or never");
}

json synthetic_to_json(const SyntheticMarketSpec& s) {
  return {{"n_stocks", s.n_stocks},
          {"n_sectors", s.n_sectors},
          {"rho_intra", s.rho_intra},
          {"rho_inter", s.rho_inter},
          {"planted_sector", std::string(to_string(s.planted_sector))},
          {"planted_loading", s.planted_loading},
          {"days", s.days},
          {"seed", s.seed},
          {"start", s.start.iso()},
          {"noise_vol", s.noise_vol},
          {"market_vol", s.market_vol},
          {"market_mean", s.market_mean},
          {"style_vol", s.style_vol},
          {"co2_vol", s.co2_vol},
          {"risk_free", s.risk_free},
          {"beta_mean", s.beta_mean},
          {"beta_spread", s.beta_spread},
          {"style_loading_sd", s.style_loading_sd},
          {"emission_ratio_min", s.emission_ratio_min},
          {"emission_ratio_max", s.emission_ratio_max}};
}

SyntheticMarketSpec synthetic_from_json(const json& j) {
  SyntheticMarketSpec s;
  s.n_stocks = j.value("n_stocks", s.n_stocks);
  s.n_sectors = j.value("n_sectors", s.n_sectors);
  s.rho_intra = j.value("rho_intra", s.rho_intra);
  s.rho_inter = j.value("rho_inter", s.rho_inter);
  if (j.contains("planted_sector")) s.planted_sector = parse_sector(j.at("planted_sector").get<std::string>());
  s.planted_loading = j.value("planted_loading", s.planted_loading);
  s.days = j.value("days", s.days);
  s.seed = j.value("seed", s.seed);
  if (j.contains("start")) s.start = Date::parse(j.at("start").get<std::string>());
  s.noise_vol = j.value("noise_vol", s.noise_vol);
  s.market_vol = j.value("market_vol", s.market_vol);
  s.market_mean = j.value("market_mean", s.market_mean);
  s.style_vol = j.value("style_vol", s.style_vol);
  s.co2_vol = j.value("co2_vol", s.co2_vol);
  s.risk_free = j.value("risk_free", s.risk_free);
  s.beta_mean = j.value("beta_mean", s.beta_mean);
  s.beta_spread = j.value("beta_spread", s.beta_spread);
  s.style_loading_sd = j.value("style_loading_sd", s.style_loading_sd);
  s.emission_ratio_min = j.value("emission_ratio_min", s.emission_ratio_min);
  s.emission_ratio_max = j.value("emission_ratio_max", s.emission_ratio_max);
  return s;
}

json config_json(const PipelineConfig& c) {
  json models = json::array();
  for (const auto m : c.models) models.push_back(std::string(to_string(m)));
  return {
      {"inputs",
       {{"prices", c.prices.string()},
        {"factors", c.factors.string()},
        {"scores", c.scores.string()},
        {"granular_scores", c.granular_scores.string()},
        {"granular_mapping", c.granular_mapping.string()},
        {"factor_scale", factor_scale_name(c.factor_scale)}}},
      {"synthetic", c.synthetic ? synthetic_to_json(*c.synthetic) : json(nullptr)},
      {"window", {{"start", c.start.iso()}, {"end", c.end.iso()}, {"expanding", c.expanding}}},
      {"factors",
       {{"list", c.factor_list},
        {"quantile", c.factor_quantile},
        {"rebalance", c.rebalance_yearly ? "yearly" : "none"},
        {"residualize_factors", c.residualize_factors}}},
      {"graph", {{"gain", std::string(to_string(c.gain))}}},
      {"node2vec",
       {{"p", c.walk.p},
        {"q", c.walk.q},
        {"num_walks", c.walk.num_walks},
        {"walk_length", c.walk.walk_length},
        {"walk_seed", c.walk.seed},
        {"weight", std::string(to_string(c.walk.weight))},
        {"dimension", c.sgns.dimension},
        {"window", c.sgns.window},
        {"negatives", c.sgns.negatives},
        {"epochs", c.sgns.epochs},
        {"learning_rate", c.sgns.learning_rate},
        {"min_learning_rate_fraction", c.sgns.min_learning_rate_fraction},
        {"sgns_seed", c.sgns.seed}}},
      {"portfolios",
       {{"k_close_far", c.k_close_far},
        {"k_longshort", c.k_longshort},
        {"n_random", c.n_random},
        {"random_seed", c.random_seed},
        {"aggregation", c.aggregation == Aggregation::Arithmetic ? "arithmetic" : "mean-log"}}},
      {"econometrics",
       {{"models", models},
        {"nw_lag", c.nw_lag ? json(*c.nw_lag) : json("auto")},
        {"excess", excess_name(c.excess)}}},
      {"metrics", {{"annualize", c.annualize}}},
      {"threads", c.threads},
  };
}

}  // namespace

StageError::StageError(std::string stage, const Error& cause)
    : Error("[stage:" + stage + "] " + cause.what()), stage_(std::move(stage)), exit_code_(exit_code_for(cause)) {}

void validate(const PipelineConfig& c) {
  if (!(c.start < c.end)) throw ConfigError("window end must be after start");
  if (!c.synthetic && (c.prices.empty() || c.factors.empty() || c.scores.empty())) {
    throw ConfigError("inputs.prices, inputs.factors and inputs.scores are required without a synthetic market");
  }
  if (c.granular_scores.empty() != c.granular_mapping.empty()) {
    throw ConfigError("granular scores and granular mapping must be given together");
  }
  if (c.factor_list.empty()) throw ConfigError("factor list is empty");
  for (const auto& f : c.factor_list) {
    if (f != kCo2Factor && f != kEsgFactor && f != kEsgPromisedFactor && f != kEsgRealizedFactor) {
      throw ConfigError("unknown factor " + f + " (expected CO2, ESG, ESGp, ESGr)");
    }
  }
  if (!(c.factor_quantile > 0.0 && c.factor_quantile < 0.5)) throw ConfigError("factor quantile must lie in (0, 0.5)");
  validate(c.walk);
  validate(c.sgns);
  if (c.k_close_far == 0 || c.k_longshort == 0 || c.n_random == 0) throw ConfigError("portfolio sizes must be positive");
  if (c.models.empty()) throw ConfigError("model list is empty");
  if (c.nw_lag && *c.nw_lag < 0) throw ConfigError("Newey-West lag must be non-negative");
  if (c.threads < 1) throw ConfigError("threads must be positive");
  if (c.synthetic) validate(*c.synthetic);
}

std::string config_to_json(const PipelineConfig& config) { return config_json(config).dump(2); }

PipelineConfig config_from_json(const std::string& text) {
  PipelineConfig c;
  try {
    json root = json::parse(text);
    if (root.contains("config") && root.contains("artifacts")) root = root.at("config");
    const json empty = json::object();
    auto obj = [&](const char* key) -> const json& { return root.contains(key) ? root.at(key) : empty; };

    const auto& in = obj("inputs");
    c.prices = in.value("prices", std::string());
    c.factors = in.value("factors", std::string());
    c.scores = in.value("scores", std::string());
    c.granular_scores = in.value("granular_scores", std::string());
    c.granular_mapping = in.value("granular_mapping", std::string());
    c.factor_scale = parse_factor_scale(in.value("factor_scale", std::string("decimal")));
    if (root.contains("synthetic") && !root.at("synthetic").is_null()) c.synthetic = synthetic_from_json(root.at("synthetic"));

    const auto& w = obj("window");
    if (w.contains("start")) c.start = Date::parse(w.at("start").get<std::string>());
    if (w.contains("end")) c.end = Date::parse(w.at("end").get<std::string>());
    c.expanding = w.value("expanding", c.expanding);

    const auto& f = obj("factors");
    if (f.contains("list")) c.factor_list = f.at("list").get<std::vector<std::string>>();
    c.factor_quantile = f.value("quantile", c.factor_quantile);
    const auto rebalance = f.value("rebalance", std::string("none"));
    if (rebalance != "none" && rebalance != "yearly") throw ConfigError("rebalance must be none or yearly");
    c.rebalance_yearly = rebalance == "yearly";
    c.residualize_factors = f.value("residualize_factors", c.residualize_factors);

    c.gain = parse_gain(obj("graph").value("gain", std::string("square")));

    const auto& n2v = obj("node2vec");
    c.walk.p = n2v.value("p", c.walk.p);
    c.walk.q = n2v.value("q", c.walk.q);
    c.walk.num_walks = n2v.value("num_walks", c.walk.num_walks);
    c.walk.walk_length = n2v.value("walk_length", c.walk.walk_length);
    c.walk.seed = n2v.value("walk_seed", c.walk.seed);
    c.walk.weight = parse_weight_transform(n2v.value("weight", std::string("positive")));
    c.sgns.dimension = n2v.value("dimension", c.sgns.dimension);
    c.sgns.window = n2v.value("window", c.sgns.window);
    c.sgns.negatives = n2v.value("negatives", c.sgns.negatives);
    c.sgns.epochs = n2v.value("epochs", c.sgns.epochs);
    c.sgns.learning_rate = n2v.value("learning_rate", c.sgns.learning_rate);
    c.sgns.min_learning_rate_fraction = n2v.value("min_learning_rate_fraction", c.sgns.min_learning_rate_fraction);
    c.sgns.seed = n2v.value("sgns_seed", c.sgns.seed);

    const auto& p = obj("portfolios");
    c.k_close_far = p.value("k_close_far", c.k_close_far);
    c.k_longshort = p.value("k_longshort", c.k_longshort);
    c.n_random = p.value("n_random", c.n_random);
    c.random_seed = p.value("random_seed", c.random_seed);
    const auto agg = p.value("aggregation", std::string("mean-log"));
    if (agg != "mean-log" && agg != "arithmetic") throw ConfigError("aggregation must be mean-log or arithmetic");
    c.aggregation = agg == "arithmetic" ? Aggregation::Arithmetic : Aggregation::MeanLog;

    const auto& e = obj("econometrics");
    if (e.contains("models")) {
      c.models.clear();
      for (const auto& m : e.at("models")) c.models.push_back(parse_model(m.get<std::string>()));
    }
    if (e.contains("nw_lag")) {
      const auto& lag = e.at("nw_lag");
      if (lag.is_string()) {
        if (lag.get<std::string>() != "auto") throw ConfigError("nw_lag must be \"auto\" or an integer");
        c.nw_lag.reset();
      } else {
        c.nw_lag = lag.get<int>();
      }
    }
    c.excess = parse_excess(e.value("excess", std::string("auto")));
    c.annualize = obj("metrics").value("annualize", c.annualize);
    c.threads = root.value("threads", c.threads);
  } catch (const json::exception& ex) {
    throw ConfigError(std::string("config: ") + ex.what());
  } catch (const DataError& ex) {
    throw ConfigError(std::string("config: ") + ex.what());
  }
  return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = csv::read_text(path);
  } catch (const DataError& e) {
    throw ConfigError(e.what());
  }
  return config_from_json(text);
}

void set_all_seeds(PipelineConfig& config, std::uint64_t seed) {
  config.walk.seed = seed;
  config.sgns.seed = seed;
  config.random_seed = seed;
}

MarketData load_market_data(const PipelineConfig& config) {
  return stage("load", [&] {
    MarketData d;
    if (config.synthetic) {
      auto m = generate_synthetic_market(*config.synthetic);
      d.prices = std::move(m.prices);
      d.factors = std::move(m.factors);
      d.scores = std::move(m.scores);
    } else {
      d.prices = load_price_panel(config.prices).panel;
      d.factors = load_factor_panel(config.factors, config.factor_scale);
      d.scores = load_scores(config.scores);
    }
    if (!config.granular_scores.empty()) {
      d.granular = load_granular_scores(config.granular_scores);
      d.mapping = load_granular_mapping(config.granular_mapping);
    }
    return d;
  });
}

namespace {

ScoreMap factor_scores(const std::string& factor, const ScoreTable& scores, const MarketData& data) {
  if (factor == kCo2Factor) return co2_scores(scores);
  if (factor == kEsgFactor) return esg_scores(scores);
  if (data.granular && (factor == kEsgPromisedFactor || factor == kEsgRealizedFactor)) {
    auto split = split_granular(*data.granular, *data.mapping);
    return factor == kEsgPromisedFactor ? split.promised : split.realized;
  }
  if (factor == kEsgPromisedFactor) return esg_promised_scores(scores);
  if (factor == kEsgRealizedFactor) return esg_realized_scores(scores);
  throw ConfigError("unknown factor " + factor);
}

}  // namespace

PipelineResult analyze(const PipelineConfig& config, const MarketData& data, Date first, Date last_exclusive,
                       std::string label) {
  stage("config", [&] { validate(config); });
  PipelineResult res;
  res.label = std::move(label);

  auto [returns, factors] = stage("align", [&] {
    const auto all = compute_log_returns(data.prices);
    const auto rr = all.rows_between(first, last_exclusive);
    const auto fr = data.factors.rows_between(first, last_exclusive);
    if (rr.empty() || fr.empty()) throw DataError("no observations in window " + first.iso() + " .. " + last_exclusive.iso());
    return align(all.select_rows(rr), data.factors.select_rows(fr));
  });
  res.first_date = returns.dates().front();
  res.last_date = returns.dates().back();

  // Constructed factors join the factor panel under their own names.
  stage("factors", [&] {
    for (const auto& name : config.factor_list) {
      const auto scores = factor_scores(name, data.scores, data);
      FactorSeries fs;
      if (config.rebalance_yearly && !config.scores.empty()) {
        fs = build_factor_yearly(name, [&](int year) {
          const auto snapshot = load_scores(config.scores, Date(year - 1, 12, 31));
          auto s = factor_scores(name, snapshot, data);
          return s.size() >= kMinScoredTickers ? s : scores;
        }, returns, config.factor_quantile);
      } else {
        fs = build_factor(name, scores, returns, config.factor_quantile);
      }
      factors = factors.with_column(name, fs.values);
      res.factors.push_back(std::move(fs));
    }
  });

  auto residuals = stage("residualize", [&] {
    auto r = residualize_panel(returns, factors);
    res.dropped_tickers = r.dropped;
    return r.residuals;
  });
  const auto& stocks = residuals.tickers();
  res.returns = returns.select_columns(stocks);
  res.factor_panel = factors;

  const auto corr = stage("correlate", [&] {
    FactorPanel node_series = factors;
    if (config.residualize_factors) {
      Eigen::MatrixXd cols(factors.rows(), static_cast<Eigen::Index>(config.factor_list.size()));
      for (std::size_t j = 0; j < config.factor_list.size(); ++j) cols.col(static_cast<Eigen::Index>(j)) = factors.column(config.factor_list[j]);
      const auto r = residualize_panel(ReturnsPanel(factors.dates(), config.factor_list, cols), factors);
      node_series = FactorPanel(factors.dates(), config.factor_list, r.residuals.values());
    }
    return pearson_matrix(residuals, node_series, config.factor_list);
  });

  res.graph = stage("tmfg", [&] { return tmfg(corr, config.gain); });

  for (const auto& t : stocks) {
    const auto* rec = data.scores.find(t);
    res.nodes.push_back({t, NodeKind::Stock, rec ? rec->sector : std::nullopt});
  }
  for (const auto& f : config.factor_list) res.nodes.push_back({f, NodeKind::Factor, std::nullopt});

  res.embedding = stage("embed", [&] {
    const WalkGraph wg(res.graph.graph, config.walk.weight);
    const auto walks = generate_walks(wg, config.walk, config.threads);
    auto sgns = config.sgns;
    sgns.threads = config.threads;
    return train_sgns(walks, res.graph.graph.labels, sgns);
  });

  res.benchmarks = stage("portfolios", [&] { return build_benchmarks(stocks, config.n_random, config.random_seed); });
  const Eigen::VectorXd rf = factors.column(kRf);
  const std::span<const double> rf_span(rf.data(), static_cast<std::size_t>(rf.size()));

  for (const auto& factor : config.factor_list) {
    FactorAnalysis a;
    a.factor = factor;
    stage("portfolios", [&] {
      a.ranking = rank_by_distance(res.embedding, factor, stocks);
      std::vector<std::string> order;
      for (const auto& r : a.ranking) order.push_back(r.node);
      auto cf = build_close_far(order, config.k_close_far);
      a.close = std::move(cf.close);
      a.far = std::move(cf.far);
      a.far_close = build_far_close(order, config.k_longshort);

      std::map<GicsSector, std::pair<double, int>> acc;
      for (const auto& r : a.ranking) {
        const auto* rec = data.scores.find(r.node);
        if (!rec || !rec->sector) continue;
        auto& [sum, count] = acc[*rec->sector];
        sum += r.distance;
        ++count;
      }
      double best = std::numeric_limits<double>::infinity();
      for (const auto& [sector, sc] : acc) {
        const double mean = sc.first / sc.second;
        a.sector_distance[sector] = mean;
        if (mean < best) {
          best = mean;
          a.nearest_sector = sector;
        }
      }
    });

    const std::vector<const Portfolio*> traded{&a.close, &a.far, &a.far_close};
    std::vector<Eigen::VectorXd> series;
    for (const auto* p : traded) series.push_back(portfolio_returns(*p, res.returns, config.aggregation));

    a.regressions.factor = factor;
    stage("regress", [&] {
      for (const auto model : config.models) {
        RegressionGrid grid;
        const ModelSpec base{model, std::nullopt};
        const ModelSpec extended{model, factor};
        grid.base_label = base.label();
        grid.extended_label = extended.label();
        for (std::size_t i = 0; i < traded.size(); ++i) {
          grid.portfolios.push_back(traded[i]->name);
          const bool ls = traded[i]->is_long_short();
          grid.base.push_back(run_model(base, traded[i]->name, series[i], ls, factors, config.nw_lag, config.excess));
          grid.extended.push_back(run_model(extended, traded[i]->name, series[i], ls, factors, config.nw_lag, config.excess));
        }
        a.regressions.grids.push_back(std::move(grid));
      }
    });

    a.metrics.factor = factor;
    stage("metrics", [&] {
      std::vector<std::pair<std::string, Eigen::VectorXd>> all;
      for (std::size_t i = 0; i < traded.size(); ++i) all.emplace_back(traded[i]->name, series[i]);
      all.emplace_back(res.benchmarks.sp.name, portfolio_returns(res.benchmarks.sp, res.returns, config.aggregation));
      all.emplace_back(res.benchmarks.random.name, portfolio_returns(res.benchmarks.random, res.returns, config.aggregation));
      for (const auto& [name, s] : all) {
        a.metrics.portfolios.push_back(name);
        a.metrics.reports.push_back(evaluate(std::span<const double>(s.data(), static_cast<std::size_t>(s.size())), rf_span, config.annualize));
      }
    });
    res.analyses.push_back(std::move(a));
  }
  return res;
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256 failed");
  }
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

std::vector<std::string> write_artifacts(const PipelineConfig& config, const MarketData& data,
                                         const PipelineResult& result, const std::filesystem::path& dir) {
  return stage("write", [&] {
    std::filesystem::create_directories(dir);
    std::vector<std::pair<std::string, std::string>> files;
    auto add = [&](std::string name, std::string text) { files.emplace_back(std::move(name), std::move(text)); };

    {
      Eigen::MatrixXd values(result.factor_panel.rows(), static_cast<Eigen::Index>(result.factors.size()));
      std::vector<std::string> names;
      for (std::size_t j = 0; j < result.factors.size(); ++j) {
        values.col(static_cast<Eigen::Index>(j)) = result.factors[j].values;
        names.push_back(result.factors[j].name);
      }
      std::ostringstream out;
      out << "date";
      for (const auto& n : names) out << ',' << n;
      out << '\n';
      for (Eigen::Index t = 0; t < values.rows(); ++t) {
        out << result.factor_panel.dates()[static_cast<std::size_t>(t)].iso();
        for (Eigen::Index j = 0; j < values.cols(); ++j) out << ',' << csv::format_number(values(t, j));
        out << '\n';
      }
      add("factors.csv", out.str());
    }
    {
      std::ostringstream out;
      out << "factor,ticker,side\n";
      for (const auto& f : result.factors) {
        for (const auto& t : f.long_members) out << f.name << ',' << t << ",long\n";
        for (const auto& t : f.short_members) out << f.name << ',' << t << ",short\n";
      }
      add("factor_members.csv", out.str());
    }
    add("sector_summary.csv", sector_summary_csv(data.scores, result.returns.tickers()));
    add("sector_summary.txt", sector_summary_table(data.scores, result.returns.tickers()));

    const auto tmp = dir / ".tmp";
    std::filesystem::create_directories(tmp);
    auto capture = [&](const std::string& name, const std::function<void(const std::filesystem::path&)>& writer) {
      writer(tmp / name);
      add(name, csv::read_text(tmp / name));
    };
    capture("graph_edges.csv", [&](const auto& p) { write_edge_list(result.graph.graph, p); });
    capture("graph_nodes.csv", [&](const auto& p) { write_node_attributes(result.nodes, p); });
    const auto map = render_embedding_map(result.embedding, result.nodes, "node2vec embedding " + result.label);
    if (map.projected) spdlog::warn("embedding has {} dimensions; the map shows the first two", result.embedding.dimension());
    add("embedding.svg", map.svg);
    capture("embedding.csv", [&](const auto& p) { write_embedding(result.embedding, result.nodes, p); });

    std::vector<Portfolio> portfolios;
    std::vector<FactorRegressions> regressions;
    std::vector<FactorMetrics> metrics;
    std::ostringstream rankings, nearest;
    rankings << "factor,rank,node,distance\n";
    nearest << "factor,sector,mean_distance,nearest\n";
    for (const auto& a : result.analyses) {
      for (auto p : {a.close, a.far, a.far_close}) {
        p.name = a.factor + ":" + p.name;
        portfolios.push_back(std::move(p));
      }
      regressions.push_back(a.regressions);
      metrics.push_back(a.metrics);
      for (std::size_t i = 0; i < a.ranking.size(); ++i) {
        rankings << a.factor << ',' << i + 1 << ',' << a.ranking[i].node << ',' << csv::format_number(a.ranking[i].distance) << '\n';
      }
      for (const auto& [sector, d] : a.sector_distance) {
        nearest << a.factor << ',' << to_string(sector) << ',' << csv::format_number(d) << ','
                << (a.nearest_sector == sector ? 1 : 0) << '\n';
      }
    }
    portfolios.push_back(result.benchmarks.sp);
    portfolios.push_back(result.benchmarks.random);
    capture("portfolios.csv", [&](const auto& p) { write_portfolios(portfolios, p); });
    std::filesystem::remove_all(tmp);

    add("rankings.csv", rankings.str());
    add("nearest_sectors.csv", nearest.str());
    add("regressions.csv", regressions_to_csv(regressions));
    add("metrics.csv", metrics_to_csv(metrics));
    add("report.txt", render_report(regressions, metrics));

    json manifest;
    const auto cfg = config_json(config);
    manifest["tool"] = "nethedge";
    manifest["label"] = result.label;
    manifest["window"] = {{"first", result.first_date.iso()}, {"last", result.last_date.iso()}};
    manifest["config"] = cfg;
    manifest["config_sha256"] = sha256_hex(cfg.dump());
    manifest["seeds"] = {{"walk", config.walk.seed},
                         {"sgns", config.sgns.seed},
                         {"random_portfolio", config.random_seed},
                         {"synthetic", config.synthetic ? json(config.synthetic->seed) : json(nullptr)}};
    manifest["dropped_tickers"] = result.dropped_tickers;
    json artifacts = json::object();
    std::vector<std::string> names;
    for (const auto& [name, text] : files) {
      csv::write_text(dir / name, text);
      artifacts[name] = sha256_hex(text);
      names.push_back(name);
    }
    manifest["artifacts"] = artifacts;
    csv::write_text(dir / "manifest.json", manifest.dump(2) + "\n");
    names.emplace_back("manifest.json");
    return names;
  });
}

PipelineResult run_pipeline(const PipelineConfig& config) {
  stage("config", [&] { validate(config); });
  const auto data = load_market_data(config);
  auto result = analyze(config, data, config.start, config.end.plus_days(1), config.start.iso() + "_" + config.end.iso());
  write_artifacts(config, data, result, config.out_dir);
  return result;
}

std::vector<WindowSpec> expanding_windows(Date start, Date end_inclusive) {
  if (!(start < end_inclusive)) throw ConfigError("window end must be after start");
  const Date stop = end_inclusive.plus_days(1);
  std::vector<WindowSpec> windows;
  for (int k = 1;; ++k) {
    Date last = start.plus_years(k);
    if (last > stop) last = stop;
    const Date shown = last.plus_days(-1);
    const std::string label = start.year() == shown.year() ? std::to_string(start.year())
                                                           : std::to_string(start.year()) + "-" + std::to_string(shown.year());
    windows.push_back({label, start, last});
    if (last == stop) break;
  }
  if (windows.size() < 2) throw ConfigError("need ≥ 2 windows (the span covers a single year)");
  return windows;
}

ExpandingResult run_expanding_windows(const PipelineConfig& config) {
  stage("config", [&] { validate(config); });
  const auto windows = stage("config", [&] { return expanding_windows(config.start, config.end); });
  const auto data = load_market_data(config);

  ExpandingResult out;
  out.windows.resize(windows.size());
  auto run_one = [&](std::size_t i, int threads) {
    auto cfg = config;
    cfg.threads = threads;
    char dirname[64];
    std::snprintf(dirname, sizeof dirname, "window_%02zu_%s", i + 1, windows[i].label.c_str());
    out.windows[i] = analyze(cfg, data, windows[i].first, windows[i].last_exclusive, windows[i].label);
    write_artifacts(cfg, data, out.windows[i], config.out_dir / dirname);
  };
  if (config.threads <= 1) {
    for (std::size_t i = 0; i < windows.size(); ++i) run_one(i, 1);
  } else {
    std::vector<std::exception_ptr> errors(windows.size());
    std::atomic<std::size_t> next{0};
    {
      std::vector<std::jthread> pool;
      const auto workers = std::min<std::size_t>(static_cast<std::size_t>(config.threads), windows.size());
      for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
          for (std::size_t i = next++; i < windows.size(); i = next++) {
            try {
              run_one(i, 1);
            } catch (...) {
              errors[i] = std::current_exception();
            }
          }
        });
      }
    }
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  std::ostringstream summary;
  summary << "window,factor,nearest_sector,mean_distance\n";
  for (const auto& w : out.windows) {
    for (const auto& a : w.analyses) {
      WindowSummary s{w.label, a.factor, a.nearest_sector, 0.0};
      if (a.nearest_sector) s.mean_distance = a.sector_distance.at(*a.nearest_sector);
      summary << s.window << ',' << s.factor << ',' << (s.nearest_sector ? std::string(to_string(*s.nearest_sector)) : "")
              << ',' << csv::format_number(s.mean_distance) << '\n';
      out.summary.push_back(std::move(s));
    }
  }
  stage("write", [&] {
    const auto text = summary.str();
    csv::write_text(config.out_dir / "windows_summary.csv", text);
    json manifest;
    manifest["tool"] = "nethedge";
    manifest["mode"] = "windows";
    manifest["config"] = config_json(config);
    manifest["config_sha256"] = sha256_hex(config_json(config).dump());
    json list = json::array();
    for (std::size_t i = 0; i < windows.size(); ++i) {
      list.push_back({{"label", windows[i].label}, {"first", windows[i].first.iso()},
                      {"last_exclusive", windows[i].last_exclusive.iso()}});
    }
    manifest["windows"] = list;
    manifest["artifacts"] = {{"windows_summary.csv", sha256_hex(text)}};
    csv::write_text(config.out_dir / "manifest.json", manifest.dump(2) + "\n");
  });
  return out;
}

}  // namespace nethedge
