#pragma once

#include <nethedge/embedder.hpp>
#include <nethedge/graph.hpp>

#include <boost/math/distributions/chi_squared.hpp>
#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <random>
#include <utility>
#include <vector>

namespace nethedge::testing {

inline WeightedGraph make_graph(int n, const std::vector<Edge>& edges) {
  WeightedGraph g;
  for (int i = 0; i < n; ++i) g.labels.push_back("n" + std::to_string(i));
  g.edges = edges;
  return g;
}

// Two k-cliques joined by a single edge between node k-1 and node k.
inline WeightedGraph barbell(int k, double weight = 1.0) {
  std::vector<Edge> e;
  for (int c = 0; c < 2; ++c) {
    for (int i = 0; i < k; ++i) {
      for (int j = i + 1; j < k; ++j) e.push_back({c * k + i, c * k + j, weight});
    }
  }
  e.push_back({k - 1, k, weight});
  return make_graph(2 * k, e);
}

// 4x4 grid with uneven weights.
inline WeightedGraph weighted_grid() {
  std::vector<Edge> e;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      const int u = r * 4 + c;
      if (c < 3) e.push_back({u, u + 1, 0.5 + 0.25 * ((u * 7) % 5)});
      if (r < 3) e.push_back({u, u + 4, 0.3 + 0.2 * ((u * 3) % 4)});
    }
  }
  return make_graph(16, e);
}

// TMFG over a random correlation matrix; signed weights exercise the
// weight transform.
inline WeightedGraph random_tmfg(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  Eigen::MatrixXd x(120, n);
  for (int i = 0; i < 120; ++i) {
    const double common = z(rng);
    for (int j = 0; j < n; ++j) x(i, j) = (j % 2 ? 0.7 : -0.4) * common + z(rng);
  }
  std::vector<std::string> labels;
  for (int j = 0; j < n; ++j) labels.push_back("v" + std::to_string(j));
  return tmfg(pearson_matrix(x, labels)).graph;
}

struct ChiSquare {
  double statistic = 0.0;
  double critical = 0.0;
  int dof = 0;
  std::size_t steps = 0;
  [[nodiscard]] bool pass() const { return dof > 0 && statistic < critical; }
};

// Pools every sampled transition (start step included) by state and tests
// the counts against transition_distribution. States whose smallest
// expected count is below 5 are left out.
inline ChiSquare transition_chi_square(const WalkGraph& graph, const WalkConfig& config, int threads = 1) {
  const auto walks = generate_walks(graph, config, threads);
  using State = std::pair<int, int>;  // (prev or -1, current)
  std::map<State, std::map<int, double>> counts;
  ChiSquare out;
  for (const auto& w : walks) {
    for (std::size_t k = 1; k < w.size(); ++k) {
      const int prev = k >= 2 ? w[k - 2] : -1;
      counts[{prev, w[k - 1]}][w[k]] += 1.0;
      ++out.steps;
    }
  }
  for (const auto& [state, next] : counts) {
    double total = 0.0;
    for (const auto& [v, c] : next) total += c;
    const auto dist = transition_distribution(
        graph, state.first < 0 ? std::nullopt : std::optional<int>(state.first), state.second, config);
    double min_expected = total;
    for (const auto& t : dist) min_expected = std::min(min_expected, total * t.probability);
    if (min_expected < 5.0) continue;
    for (const auto& t : dist) {
      const double expected = total * t.probability;
      const auto it = next.find(t.node);
      const double observed = it == next.end() ? 0.0 : it->second;
      out.statistic += (observed - expected) * (observed - expected) / expected;
    }
    out.dof += static_cast<int>(dist.size()) - 1;
  }
  if (out.dof > 0) {
    out.critical = boost::math::quantile(boost::math::chi_squared(out.dof), 0.99);
  }
  return out;
}

struct FiniteDifference {
  double max_relative_error = 0.0;
};

// Central differences of sgns_pair_objective against sgns_pair_gradient at
// `points` random points.
inline FiniteDifference sgns_gradient_check(int points, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0.0, 0.7);
  std::uniform_int_distribution<int> dims(2, 16), negs(0, 8);
  FiniteDifference out;
  const double h = 1e-5;
  for (int p = 0; p < points; ++p) {
    const int d = dims(rng);
    const int k = negs(rng);
    auto draw = [&] {
      Eigen::VectorXd v(d);
      for (int i = 0; i < d; ++i) v(i) = z(rng);
      return v;
    };
    Eigen::VectorXd center = draw(), context = draw();
    std::vector<Eigen::VectorXd> negatives;
    for (int i = 0; i < k; ++i) negatives.push_back(draw());
    const auto analytic = sgns_pair_gradient(center, context, negatives);

    // Flatten: center, context, negatives.
    std::vector<Eigen::VectorXd*> blocks{&center, &context};
    std::vector<const Eigen::VectorXd*> grads{&analytic.center, &analytic.context};
    for (int i = 0; i < k; ++i) {
      blocks.push_back(&negatives[static_cast<std::size_t>(i)]);
      grads.push_back(&analytic.negatives[static_cast<std::size_t>(i)]);
    }
    double diff = 0.0, scale = 0.0;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      for (int i = 0; i < d; ++i) {
        double& x = (*blocks[b])(i);
        const double saved = x;
        x = saved + h;
        const double up = sgns_pair_objective(center, context, negatives);
        x = saved - h;
        const double down = sgns_pair_objective(center, context, negatives);
        x = saved;
        const double numeric = (up - down) / (2 * h);
        const double a = (*grads[b])(i);
        diff += (a - numeric) * (a - numeric);
        scale = std::max(scale, std::max(a * a, numeric * numeric));
      }
    }
    const double rel = std::sqrt(diff) / std::max(std::sqrt(scale), 1e-12);
    out.max_relative_error = std::max(out.max_relative_error, rel);
  }
  return out;
}

struct Separation {
  double intra = 0.0;
  double inter = 0.0;
};

// Mean Euclidean distance within and across the two cliques of barbell(k).
inline Separation clique_separation(std::uint64_t seed, int k = 10) {
  const auto g = barbell(k);
  WalkConfig wc;
  wc.seed = seed;
  SgnsConfig sc;
  sc.dimension = 2;
  sc.seed = seed;
  const WalkGraph wg(g, wc.weight);
  const auto space = train_sgns(generate_walks(wg, wc), g.labels, sc);
  Separation s;
  int n_intra = 0, n_inter = 0;
  for (int i = 0; i < 2 * k; ++i) {
    for (int j = i + 1; j < 2 * k; ++j) {
      const double dist = (space.vectors.row(i) - space.vectors.row(j)).norm();
      if ((i < k) == (j < k)) {
        s.intra += dist;
        ++n_intra;
      } else {
        s.inter += dist;
        ++n_inter;
      }
    }
  }
  s.intra /= n_intra;
  s.inter /= n_inter;
  return s;
}

}  // namespace nethedge::testing
