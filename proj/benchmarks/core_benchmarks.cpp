#include <nethedge/econometrics.hpp>
#include <nethedge/embedder.hpp>
#include <nethedge/graph.hpp>
#include <nethedge/ols.hpp>

#include <benchmark/benchmark.h>

#include <random>

namespace {

using namespace nethedge;

CorrelationMatrix random_correlation(int n, int t, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  Eigen::MatrixXd x(t, n);
  for (int i = 0; i < t; ++i) {
    const double common = z(rng);
    for (int j = 0; j < n; ++j) x(i, j) = 0.4 * common + z(rng);
  }
  std::vector<std::string> labels;
  for (int j = 0; j < n; ++j) labels.push_back("s" + std::to_string(j));
  return pearson_matrix(x, labels);
}

void BM_Tmfg(benchmark::State& state) {
  const auto corr = random_correlation(static_cast<int>(state.range(0)), 300, 1);
  for (auto _ : state) benchmark::DoNotOptimize(tmfg(corr));
}
BENCHMARK(BM_Tmfg)->Arg(100)->Arg(250)->Arg(500)->Unit(benchmark::kMillisecond);

void BM_Walks(benchmark::State& state) {
  const auto fg = tmfg(random_correlation(500, 300, 2));
  const WalkGraph wg(fg.graph, WeightTransform::Positive);
  WalkConfig wc;
  wc.p = 0.5;
  wc.q = 2.0;
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(generate_walks(wg, wc, threads));
}
BENCHMARK(BM_Walks)->Arg(1)->Arg(4)->UseRealTime()->Unit(benchmark::kMillisecond);

void BM_Sgns(benchmark::State& state) {
  const auto fg = tmfg(random_correlation(500, 300, 3));
  const WalkGraph wg(fg.graph, WeightTransform::Positive);
  WalkConfig wc;
  wc.num_walks = 5;
  const auto walks = generate_walks(wg, wc);
  SgnsConfig sc;
  sc.epochs = 1;
  sc.threads = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(train_sgns(walks, fg.graph.labels, sc));
}
BENCHMARK(BM_Sgns)->Arg(1)->Arg(4)->UseRealTime()->Unit(benchmark::kMillisecond);

void BM_OlsWithHac(benchmark::State& state) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> z(0.0, 1.0);
  const int t = static_cast<int>(state.range(0));
  Eigen::MatrixXd x(t, 7);
  Eigen::VectorXd y(t);
  for (int i = 0; i < t; ++i) {
    x(i, 0) = 1.0;
    for (int j = 1; j < 7; ++j) x(i, j) = z(rng);
    y(i) = x.row(i).sum() + z(rng);
  }
  const int lag = auto_newey_west_lag(static_cast<std::size_t>(t));
  for (auto _ : state) {
    const auto fit = ols_fit(y, x);
    benchmark::DoNotOptimize(newey_west_cov(x, fit.residuals, lag, fit.xtx_inverse));
  }
}
BENCHMARK(BM_OlsWithHac)->Arg(1500)->Arg(5000);

}  // namespace

BENCHMARK_MAIN();
