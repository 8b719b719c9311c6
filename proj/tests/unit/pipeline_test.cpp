#include "support.hpp"

#include <nethedge/csv.hpp>
#include <nethedge/pipeline.hpp>

#include <json.hpp>

#include <map>

namespace nethedge {
namespace {

PipelineConfig small_config(const std::filesystem::path& out) {
  PipelineConfig c;
  SyntheticMarketSpec s;
  s.n_stocks = 60;
  s.n_sectors = 4;
  s.days = 400;
  s.seed = 3;
  c.synthetic = s;
  c.start = Date(2015, 1, 1);
  c.end = Date(2016, 6, 30);
  c.factor_list = {"CO2"};
  c.k_close_far = 10;
  c.k_longshort = 5;
  c.n_random = 20;
  c.walk.num_walks = 5;
  c.walk.walk_length = 20;
  c.sgns.epochs = 2;
  c.out_dir = out;
  return c;
}

std::map<std::string, std::string> directory_bytes(const std::filesystem::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.is_regular_file()) out[e.path().filename().string()] = csv::read_text(e.path());
  }
  return out;
}

TEST(Config, JsonRoundTrip) {
  auto c = small_config("x");
  c.gain = GainTransform::Absolute;
  c.nw_lag = 3;
  c.rebalance_yearly = true;
  c.aggregation = Aggregation::Arithmetic;
  c.models = {ModelName::FF5};
  set_all_seeds(c, 99);
  const auto text = config_to_json(c);
  const auto back = config_from_json(text);
  EXPECT_EQ(config_to_json(back), text);
  EXPECT_EQ(back.walk.seed, 99u);
  EXPECT_EQ(back.sgns.seed, 99u);
  EXPECT_EQ(back.random_seed, 99u);
  EXPECT_EQ(back.nw_lag, 3);
  EXPECT_EQ(back.gain, GainTransform::Absolute);
}

TEST(Config, MissingKeysKeepDefaults) {
  const auto c = config_from_json(R"({"synthetic": {}, "graph": {"gain": "raw"}})");
  EXPECT_EQ(c.gain, GainTransform::Raw);
  EXPECT_EQ(c.walk.num_walks, WalkConfig{}.num_walks);
  ASSERT_TRUE(c.synthetic);
  EXPECT_EQ(c.synthetic->n_stocks, SyntheticMarketSpec{}.n_stocks);
}

TEST(Config, Validation) {
  auto c = small_config("x");
  EXPECT_NO_THROW(validate(c));
  c.end = Date(2014, 1, 1);
  EXPECT_THROW(validate(c), ConfigError);
  c = small_config("x");
  c.synthetic.reset();
  EXPECT_THROW(validate(c), ConfigError);
  c = small_config("x");
  c.factor_list = {"NOPE"};
  EXPECT_THROW(validate(c), ConfigError);
  c = small_config("x");
  c.threads = 0;
  EXPECT_THROW(validate(c), ConfigError);
  EXPECT_THROW(config_from_json("{not json"), ConfigError);
  EXPECT_THROW(config_from_json(R"({"graph": {"gain": "cube"}})"), ConfigError);
}

TEST(ExpandingWindows, SixYears) {
  const auto w = expanding_windows(Date(2015, 1, 1), Date(2020, 12, 31));
  ASSERT_EQ(w.size(), 6u);
  EXPECT_EQ(w.front().label, "2015");
  EXPECT_EQ(w.back().label, "2015-2020");
  for (const auto& s : w) EXPECT_EQ(s.first, Date(2015, 1, 1));
  EXPECT_EQ(w[0].last_exclusive, Date(2016, 1, 1));
  EXPECT_EQ(w[5].last_exclusive, Date(2021, 1, 1));
}

TEST(ExpandingWindows, SingleYearRejected) {
  try {
    expanding_windows(Date(2015, 1, 1), Date(2015, 12, 31));
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("need"), std::string::npos);
  }
}

TEST(Pipeline, DeterministicAndReproducibleFromManifest) {
  const auto dir = testing::scratch_dir();
  const auto c = small_config(dir / "a");
  const auto r = run_pipeline(c);
  ASSERT_EQ(r.analyses.size(), 1u);
  EXPECT_EQ(r.graph.graph.edges.size(), 3u * (r.graph.graph.labels.size() - 2));
  const auto first = directory_bytes(dir / "a");
  EXPECT_TRUE(first.count("manifest.json"));
  EXPECT_TRUE(first.count("report.txt"));
  EXPECT_TRUE(first.count("embedding.svg"));

  auto again = load_config(dir / "a" / "manifest.json");
  again.out_dir = dir / "b";
  run_pipeline(again);
  EXPECT_EQ(directory_bytes(dir / "b"), first);

  // Walks are thread-count independent; parallel SGNS is not, so only the graph is compared.
  auto threaded = c;
  threaded.threads = 3;
  threaded.out_dir = dir / "c";
  run_pipeline(threaded);
  const auto third = directory_bytes(dir / "c");
  EXPECT_EQ(third.at("graph_edges.csv"), first.at("graph_edges.csv"));

  const auto manifest = nlohmann::json::parse(first.at("manifest.json"));
  for (const auto& [name, hash] : manifest.at("artifacts").items()) {
    EXPECT_EQ(hash.get<std::string>(), sha256_hex(first.at(name))) << name;
  }
  EXPECT_EQ(render_report_from_artifacts(dir / "a"), first.at("report.txt"));
}

TEST(Pipeline, StageErrorsCarryExitCodes) {
  const auto dir = testing::scratch_dir();
  auto c = small_config(dir);
  c.synthetic.reset();
  c.prices = dir / "missing.csv";
  c.factors = dir / "missing.csv";
  c.scores = dir / "missing.csv";
  try {
    run_pipeline(c);
    FAIL();
  } catch (const StageError& e) {
    EXPECT_EQ(e.stage(), "load");
    EXPECT_EQ(e.exit_code(), 3);
    EXPECT_NE(std::string(e.what()).find("[stage:load]"), std::string::npos);
  }
  c = small_config(dir);
  c.start = Date(2030, 1, 1);
  c.end = Date(2031, 1, 1);
  try {
    run_pipeline(c);
    FAIL();
  } catch (const StageError& e) {
    EXPECT_EQ(e.exit_code(), 3);
  }
}

TEST(Sha256, KnownDigest) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

}  // namespace
}  // namespace nethedge
