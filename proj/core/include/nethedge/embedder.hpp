#pragma once

#include "nethedge/alias_table.hpp"
#include "nethedge/graph.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nethedge {

/// Maps a signed edge weight to non-negative transition mass.
enum class WeightTransform { Positive, Absolute, Square };

WeightTransform parse_weight_transform(std::string_view text);
std::string_view to_string(WeightTransform t);

/// node2vec walk parameters.
struct WalkConfig {
  double p = 1.0;  ///< return parameter
  double q = 1.0;  ///< in-out parameter
  int num_walks = 20;
  int walk_length = 80;
  std::uint64_t seed = 42;
  WeightTransform weight = WeightTransform::Positive;
};

/// Throws ConfigError on non-positive parameters or walk_length < 2.
void validate(const WalkConfig& config);

/// Adjacency over the transformed weights. Zero-mass edges are dropped;
/// neighbour lists are sorted by node index.
class WalkGraph {
 public:
  WalkGraph(const WeightedGraph& graph, WeightTransform transform);

  [[nodiscard]] int node_count() const { return static_cast<int>(offsets_.size()) - 1; }
  [[nodiscard]] std::span<const int> neighbors(int u) const;
  [[nodiscard]] std::span<const double> weights(int u) const;
  [[nodiscard]] bool adjacent(int u, int v) const;
  [[nodiscard]] const std::vector<std::string>& labels() const { return labels_; }

 private:
  std::vector<std::string> labels_;
  std::vector<std::size_t> offsets_;
  std::vector<int> targets_;
  std::vector<double> weights_;
};

struct Transition {
  int node;
  double probability;
};

/// Second-order transition probabilities out of `current` having arrived
/// from `prev` (none at the start of a walk). Mass to neighbour x is
/// w(current, x) * a, with a = 1/p for x == prev, 1 when x is adjacent to
/// prev, 1/q otherwise. Throws DataError when `current` has no neighbours.
std::vector<Transition> transition_distribution(const WalkGraph& graph, std::optional<int> prev, int current,
                                                const WalkConfig& config);

using Walk = std::vector<int>;

/// Biased random walk sampler with precomputed alias tables for every
/// first-step and (prev, current) state.
class WalkSampler {
 public:
  WalkSampler(const WalkGraph& graph, const WalkConfig& config);

  /// One walk from `start`, seeded by (seed, start, walk_index). Stops
  /// early at a node without neighbours.
  [[nodiscard]] Walk walk(int start, int walk_index) const;

 private:
  const WalkGraph* graph_;
  WalkConfig config_;
  std::vector<AliasTable> first_step_;
  std::vector<std::size_t> edge_offsets_;  // CSR offsets mirroring the graph
  std::vector<AliasTable> edge_step_;      // indexed by directed edge prev->current
};

/// num_walks walks from every node, ordered (walk index, start node).
/// Output is identical for any thread count.
std::vector<Walk> generate_walks(const WalkGraph& graph, const WalkConfig& config, int threads = 1);

struct SgnsConfig {
  int dimension = 2;
  int window = 10;
  int negatives = 5;
  int epochs = 5;
  double learning_rate = 0.025;
  /// Floor of the linear decay as a fraction of learning_rate.
  double min_learning_rate_fraction = 1e-4;
  std::uint64_t seed = 42;
  /// 1 = deterministic; >1 = lock-free parallel (reproducible in
  /// distribution only).
  int threads = 1;
};

void validate(const SgnsConfig& config);

struct EmbeddingSpace {
  std::vector<std::string> labels;
  Eigen::MatrixXd vectors;          ///< node x d, used for distances
  Eigen::MatrixXd context_vectors;  ///< node x d, training only

  [[nodiscard]] int dimension() const { return static_cast<int>(vectors.cols()); }
  [[nodiscard]] std::optional<int> index_of(std::string_view label) const;
};

/// Skip-gram with negative sampling over the walks. Negatives follow the
/// unigram^(3/4) distribution of walk occurrences; learning rate decays
/// linearly over all training tokens. Throws NumericalError on a
/// non-finite update.
EmbeddingSpace train_sgns(std::span<const Walk> walks, const std::vector<std::string>& labels,
                          const SgnsConfig& config);

/// log s(z.c) + sum_k log s(-z.n_k) for one (center, context) pair.
double sgns_pair_objective(const Eigen::VectorXd& center, const Eigen::VectorXd& context,
                           const std::vector<Eigen::VectorXd>& negatives);

struct SgnsGradient {
  Eigen::VectorXd center;
  Eigen::VectorXd context;
  std::vector<Eigen::VectorXd> negatives;
};

/// Analytic gradient of sgns_pair_objective.
SgnsGradient sgns_pair_gradient(const Eigen::VectorXd& center, const Eigen::VectorXd& context,
                                const std::vector<Eigen::VectorXd>& negatives);

/// Euclidean distance between two embedded nodes. Throws DataError for an
/// unknown node.
double distance(const EmbeddingSpace& space, std::string_view a, std::string_view b);

struct RankedNode {
  std::string node;
  double distance;
};

/// Candidates sorted by ascending distance to `anchor`, ties by label.
std::vector<RankedNode> rank_by_distance(const EmbeddingSpace& space, std::string_view anchor,
                                         const std::vector<std::string>& candidates);

/// `node,kind,sector,x1..xd`; `attributes` supplies kind/sector by node.
void write_embedding(const EmbeddingSpace& space, const std::vector<NodeAttributes>& attributes,
                     const std::filesystem::path& path);

struct EmbeddingFile {
  EmbeddingSpace space;  ///< context vectors left empty
  std::vector<NodeAttributes> attributes;
};

EmbeddingFile read_embedding(const std::filesystem::path& path);

}  // namespace nethedge
