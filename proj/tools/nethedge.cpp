// nethedge: sustainability-factor hedging through correlation-network embeddings.

#include <nethedge/csv.hpp>
#include <nethedge/errors.hpp>
#include <nethedge/pipeline.hpp>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

namespace {

using namespace nethedge;

// Flag values; unset options leave the config untouched.
struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::string> gain;
  std::optional<int> dim;
  std::optional<std::string> factor_scale;
  std::optional<std::string> out;
  std::optional<std::string> prices, factors, scores;
  std::optional<std::string> start, end;
  std::optional<std::string> rebalance;
  bool residualize_factors = false;
  bool arithmetic = false;
  bool no_annualize = false;
  bool synthetic = false;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "JSON config file or a run manifest");
  cmd->add_option("--seed", o.seed, "seed for walks, SGNS and the random benchmark");
  cmd->add_option("--threads", o.threads, "worker threads (1 = deterministic)")->check(CLI::PositiveNumber);
  cmd->add_option("--gain", o.gain, "TMFG gain transform")->check(CLI::IsMember({"raw", "abs", "square"}));
  cmd->add_option("--dim", o.dim, "embedding dimension")->check(CLI::PositiveNumber);
  cmd->add_option("--out", o.out, "output directory");
}

void add_pipeline(CLI::App* cmd, Overrides& o) {
  add_common(cmd, o);
  cmd->add_option("--factor-scale", o.factor_scale, "units of the factor file")
      ->check(CLI::IsMember({"percent", "decimal"}));
  cmd->add_option("--prices", o.prices, "price panel CSV");
  cmd->add_option("--factors", o.factors, "Fama-French factor CSV");
  cmd->add_option("--scores", o.scores, "sustainability score CSV");
  cmd->add_option("--start", o.start, "first date (YYYY-MM-DD)");
  cmd->add_option("--end", o.end, "last date, inclusive (YYYY-MM-DD)");
  cmd->add_flag("--synthetic", o.synthetic, "use a generated market instead of input files");
  cmd->add_flag("--residualize-factors", o.residualize_factors, "use factor residuals as graph nodes");
  cmd->add_option("--rebalance", o.rebalance, "factor membership schedule")->check(CLI::IsMember({"none", "yearly"}));
  cmd->add_flag("--arithmetic", o.arithmetic, "aggregate simple returns instead of mean log returns");
  cmd->add_flag("--no-annualize", o.no_annualize, "report daily Sharpe and Sortino ratios");
}

PipelineConfig resolve(const Overrides& o) {
  PipelineConfig c = o.config.empty() ? PipelineConfig{} : load_config(o.config);
  if (o.seed) set_all_seeds(c, *o.seed);
  if (o.threads) {
    c.threads = *o.threads;
    c.sgns.threads = *o.threads;
  }
  if (o.gain) c.gain = parse_gain(*o.gain);
  if (o.dim) c.sgns.dimension = *o.dim;
  if (o.factor_scale) c.factor_scale = *o.factor_scale == "percent" ? FactorScale::Percent : FactorScale::Decimal;
  if (o.out) c.out_dir = *o.out;
  if (o.prices) c.prices = *o.prices;
  if (o.factors) c.factors = *o.factors;
  if (o.scores) c.scores = *o.scores;
  try {
    if (o.start) c.start = Date::parse(*o.start);
    if (o.end) c.end = Date::parse(*o.end);
  } catch (const DataError& e) {
    throw ConfigError(e.what());
  }
  if (o.synthetic && !c.synthetic) c.synthetic = SyntheticMarketSpec{};
  if (o.residualize_factors) c.residualize_factors = true;
  if (o.rebalance) c.rebalance_yearly = *o.rebalance == "yearly";
  if (o.arithmetic) c.aggregation = Aggregation::Arithmetic;
  if (o.no_annualize) c.annualize = false;
  return c;
}

int exit_code(const Error& e) {
  if (const auto* s = dynamic_cast<const StageError*>(&e)) return s->exit_code();
  if (dynamic_cast<const ConfigError*>(&e)) return 2;
  if (dynamic_cast<const NumericalError*>(&e)) return 4;
  return 3;
}

int cmd_run(const Overrides& o) {
  const auto config = resolve(o);
  const auto result = run_pipeline(config);
  for (const auto& a : result.analyses) {
    std::printf("%s: nearest sector %s\n", a.factor.c_str(),
                a.nearest_sector ? std::string(to_string(*a.nearest_sector)).c_str() : "-");
  }
  std::printf("artifacts in %s\n", config.out_dir.string().c_str());
  return 0;
}

int cmd_windows(const Overrides& o) {
  const auto config = resolve(o);
  const auto result = run_expanding_windows(config);
  for (const auto& s : result.summary) {
    std::printf("%-12s %-5s %s\n", s.window.c_str(), s.factor.c_str(),
                s.nearest_sector ? std::string(to_string(*s.nearest_sector)).c_str() : "-");
  }
  std::printf("artifacts in %s\n", config.out_dir.string().c_str());
  return 0;
}

struct SynthOptions {
  std::string config;
  std::string out = "synthetic-market";
  std::optional<std::uint64_t> seed;
  std::optional<int> stocks, sectors, days;
  std::optional<double> rho_intra, rho_inter, loading;
};

int cmd_synth(const SynthOptions& o) {
  SyntheticMarketSpec spec;
  if (!o.config.empty()) {
    const auto c = load_config(o.config);
    if (c.synthetic) spec = *c.synthetic;
  }
  if (o.seed) spec.seed = *o.seed;
  if (o.stocks) spec.n_stocks = *o.stocks;
  if (o.sectors) spec.n_sectors = *o.sectors;
  if (o.days) spec.days = *o.days;
  if (o.rho_intra) spec.rho_intra = *o.rho_intra;
  if (o.rho_inter) spec.rho_inter = *o.rho_inter;
  if (o.loading) spec.planted_loading = *o.loading;
  const auto market = generate_synthetic_market(spec);
  const std::filesystem::path dir = o.out;
  write_price_panel(market.prices, dir / "prices.csv");
  write_panel(market.factors, dir / "factors.csv");
  write_scores(market.scores, dir / "scores.csv");

  PipelineConfig run;
  run.prices = std::filesystem::absolute(dir / "prices.csv");
  run.factors = std::filesystem::absolute(dir / "factors.csv");
  run.scores = std::filesystem::absolute(dir / "scores.csv");
  run.start = market.prices.dates().front();
  run.end = market.prices.dates().back();
  csv::write_text(dir / "config.json", config_to_json(run) + "\n");
  std::printf("wrote %d stocks x %zu days to %s\n", spec.n_stocks, market.prices.dates().size(), dir.string().c_str());
  return 0;
}

struct EmbedOptions {
  std::string edges;
  std::string nodes;
  std::string out = "embedding-out";
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads, dim;
  std::optional<double> p, q;
  std::optional<int> walks, length;
  std::optional<std::string> weight;
};

int cmd_embed(const EmbedOptions& o) {
  PipelineConfig c = o.config.empty() ? PipelineConfig{} : load_config(o.config);
  if (o.seed) set_all_seeds(c, *o.seed);
  if (o.threads) c.threads = *o.threads;
  if (o.dim) c.sgns.dimension = *o.dim;
  if (o.p) c.walk.p = *o.p;
  if (o.q) c.walk.q = *o.q;
  if (o.walks) c.walk.num_walks = *o.walks;
  if (o.length) c.walk.walk_length = *o.length;
  if (o.weight) c.walk.weight = parse_weight_transform(*o.weight);
  validate(c.walk);
  validate(c.sgns);

  std::vector<NodeAttributes> attrs;
  if (!o.nodes.empty()) attrs = read_node_attributes(o.nodes);
  const auto graph = read_edge_list(o.edges, attrs.empty() ? nullptr : &attrs);
  if (attrs.empty()) {
    for (const auto& l : graph.labels) attrs.push_back({l, NodeKind::Stock, std::nullopt});
  }
  const WalkGraph wg(graph, c.walk.weight);
  const auto walks = generate_walks(wg, c.walk, c.threads);
  auto sgns = c.sgns;
  sgns.threads = c.threads;
  const auto space = train_sgns(walks, graph.labels, sgns);
  emit_embedding_map(space, attrs, o.out, "embedding", "node2vec embedding");
  std::printf("embedded %zu nodes in %d dimensions into %s\n", graph.labels.size(), space.dimension(), o.out.c_str());
  return 0;
}

int cmd_report(const std::string& from, const std::string& out) {
  const auto text = render_report_from_artifacts(from);
  if (!out.empty()) csv::write_text(out, text);
  std::fputs(text.c_str(), stdout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nethedge: hedge sustainability risk with correlation-network embeddings"};
  app.require_subcommand(1);
  app.fallthrough();
  bool verbose = false;
  bool quiet = false;
  app.add_flag("-v,--verbose", verbose, "debug logging");
  app.add_flag("-q,--quiet", quiet, "errors only");

  Overrides run_opts, windows_opts;
  auto* run = app.add_subcommand("run", "full pipeline over one window");
  add_pipeline(run, run_opts);
  auto* windows = app.add_subcommand("windows", "expanding-window study");
  add_pipeline(windows, windows_opts);

  SynthOptions synth_opts;
  auto* synth = app.add_subcommand("synth", "generate a synthetic market");
  synth->add_option("--config", synth_opts.config, "config whose \"synthetic\" block sets the defaults");
  synth->add_option("--out", synth_opts.out, "output directory");
  synth->add_option("--seed", synth_opts.seed, "generator seed");
  synth->add_option("--stocks", synth_opts.stocks, "number of stocks");
  synth->add_option("--sectors", synth_opts.sectors, "number of sectors");
  synth->add_option("--days", synth_opts.days, "number of return days");
  synth->add_option("--rho-intra", synth_opts.rho_intra, "within-sector noise correlation");
  synth->add_option("--rho-inter", synth_opts.rho_inter, "cross-sector noise correlation");
  synth->add_option("--loading", synth_opts.loading, "planted sector loading on the carbon factor");

  EmbedOptions embed_opts;
  auto* embed = app.add_subcommand("embed", "node2vec embedding of an edge list");
  embed->add_option("--edges", embed_opts.edges, "edge list src,dst,weight")->required();
  embed->add_option("--nodes", embed_opts.nodes, "node attributes node,kind,sector");
  embed->add_option("--out", embed_opts.out, "output directory");
  embed->add_option("--config", embed_opts.config, "config supplying node2vec settings");
  embed->add_option("--seed", embed_opts.seed, "walk and SGNS seed");
  embed->add_option("--threads", embed_opts.threads, "worker threads")->check(CLI::PositiveNumber);
  embed->add_option("--dim", embed_opts.dim, "embedding dimension")->check(CLI::PositiveNumber);
  embed->add_option("--p", embed_opts.p, "return parameter");
  embed->add_option("--q", embed_opts.q, "in-out parameter");
  embed->add_option("--walks", embed_opts.walks, "walks per node");
  embed->add_option("--walk-length", embed_opts.length, "steps per walk");
  embed->add_option("--weight", embed_opts.weight, "edge weight transform")
      ->check(CLI::IsMember({"positive", "abs", "square"}));

  std::string report_from, report_out;
  auto* report = app.add_subcommand("report", "re-render tables from a run directory");
  report->add_option("--from,dir", report_from, "run directory")->required();
  report->add_option("--out", report_out, "also write the report to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  spdlog::set_level(verbose ? spdlog::level::debug : quiet ? spdlog::level::err : spdlog::level::info);

  try {
    if (*run) return cmd_run(run_opts);
    if (*windows) return cmd_windows(windows_opts);
    if (*synth) return cmd_synth(synth_opts);
    if (*embed) return cmd_embed(embed_opts);
    if (*report) return cmd_report(report_from, report_out);
  } catch (const Error& e) {
    spdlog::error("{}", e.what());
    return exit_code(e);
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 3;
  }
  return 0;
}
