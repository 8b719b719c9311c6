#include "nethedge/embedder.hpp"

#include "nethedge/csv.hpp"
#include "nethedge/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

namespace nethedge {

WeightTransform parse_weight_transform(std::string_view text) {
  if (text == "positive") return WeightTransform::Positive;
  if (text == "abs") return WeightTransform::Absolute;
  if (text == "square") return WeightTransform::Square;
  throw ConfigError("unknown walk weight transform: " + std::string(text));
}

std::string_view to_string(WeightTransform t) {
  switch (t) {
    case WeightTransform::Positive: return "positive";
    case WeightTransform::Absolute: return "abs";
    case WeightTransform::Square: return "square";
  }
  return "positive";
}

void validate(const WalkConfig& c) {
  if (!(c.p > 0.0) || !(c.q > 0.0)) throw ConfigError("node2vec p and q must be positive");
  if (c.num_walks < 1) throw ConfigError("num_walks must be positive");
  if (c.walk_length < 2) throw ConfigError("walk_length must be at least 2");
}

void validate(const SgnsConfig& c) {
  if (c.dimension < 2) throw ConfigError("embedding dimension must be at least 2");
  if (c.window < 1) throw ConfigError("window must be positive");
  if (c.negatives < 0) throw ConfigError("negatives must be non-negative");
  if (c.epochs < 1) throw ConfigError("epochs must be positive");
  if (!(c.learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
  if (c.threads < 1) throw ConfigError("threads must be positive");
}

namespace {

double transform_weight(double w, WeightTransform t) {
  switch (t) {
    case WeightTransform::Positive: return std::max(w, 0.0);
    case WeightTransform::Absolute: return std::abs(w);
    case WeightTransform::Square: return w * w;
  }
  return 0.0;
}

}  // namespace

WalkGraph::WalkGraph(const WeightedGraph& graph, WeightTransform transform) : labels_(graph.labels) {
  const int n = graph.node_count();
  std::vector<std::vector<std::pair<int, double>>> adj(static_cast<std::size_t>(n));
  for (const auto& e : graph.edges) {
    if (e.a < 0 || e.b < 0 || e.a >= n || e.b >= n || e.a == e.b) throw DataError("walk graph: invalid edge");
    const double w = transform_weight(e.weight, transform);
    if (!std::isfinite(w)) throw DataError("walk graph: non-finite edge weight");
    if (w <= 0.0) continue;
    adj[static_cast<std::size_t>(e.a)].emplace_back(e.b, w);
    adj[static_cast<std::size_t>(e.b)].emplace_back(e.a, w);
  }
  offsets_.assign(1, 0);
  for (auto& list : adj) {
    std::sort(list.begin(), list.end());
    for (std::size_t k = 1; k < list.size(); ++k) {
      if (list[k].first == list[k - 1].first) throw DataError("walk graph: duplicate edge");
    }
    for (const auto& [v, w] : list) {
      targets_.push_back(v);
      weights_.push_back(w);
    }
    offsets_.push_back(targets_.size());
  }
}

std::span<const int> WalkGraph::neighbors(int u) const {
  const auto b = offsets_[static_cast<std::size_t>(u)], e = offsets_[static_cast<std::size_t>(u) + 1];
  return {targets_.data() + b, e - b};
}

std::span<const double> WalkGraph::weights(int u) const {
  const auto b = offsets_[static_cast<std::size_t>(u)], e = offsets_[static_cast<std::size_t>(u) + 1];
  return {weights_.data() + b, e - b};
}

bool WalkGraph::adjacent(int u, int v) const {
  const auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

namespace {

std::vector<double> transition_mass(const WalkGraph& graph, std::optional<int> prev, int current,
                                    const WalkConfig& config) {
  const auto nb = graph.neighbors(current);
  const auto w = graph.weights(current);
  std::vector<double> mass(nb.size());
  for (std::size_t k = 0; k < nb.size(); ++k) {
    double alpha = 1.0;
    if (prev) {
      if (nb[k] == *prev) {
        alpha = 1.0 / config.p;
      } else if (!graph.adjacent(*prev, nb[k])) {
        alpha = 1.0 / config.q;
      }
    }
    mass[k] = w[k] * alpha;
  }
  return mass;
}

std::mt19937_64 walk_rng(std::uint64_t seed, int start, int walk_index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(start), static_cast<std::uint32_t>(walk_index)};
  return std::mt19937_64(seq);
}

}  // namespace

std::vector<Transition> transition_distribution(const WalkGraph& graph, std::optional<int> prev, int current,
                                                const WalkConfig& config) {
  validate(config);
  if (current < 0 || current >= graph.node_count()) throw DataError("transition: unknown node");
  if (graph.neighbors(current).empty()) throw DataError("transition: isolated node " + graph.labels()[static_cast<std::size_t>(current)]);
  if (prev && !graph.adjacent(current, *prev)) throw DataError("transition: previous node is not a neighbour");
  const auto mass = transition_mass(graph, prev, current, config);
  const double total = std::accumulate(mass.begin(), mass.end(), 0.0);
  const auto nb = graph.neighbors(current);
  std::vector<Transition> out;
  out.reserve(nb.size());
  for (std::size_t k = 0; k < nb.size(); ++k) out.push_back({nb[k], mass[k] / total});
  return out;
}

WalkSampler::WalkSampler(const WalkGraph& graph, const WalkConfig& config) : graph_(&graph), config_(config) {
  validate(config);
  const int n = graph.node_count();
  first_step_.resize(static_cast<std::size_t>(n));
  edge_offsets_.assign(1, 0);
  for (int u = 0; u < n; ++u) {
    const auto w = graph.weights(u);
    if (!w.empty()) first_step_[static_cast<std::size_t>(u)] = AliasTable(w);
    edge_offsets_.push_back(edge_offsets_.back() + w.size());
  }
  edge_step_.resize(edge_offsets_.back());
  for (int u = 0; u < n; ++u) {
    const auto nb = graph.neighbors(u);
    for (std::size_t k = 0; k < nb.size(); ++k) {
      const int cur = nb[k];
      if (graph.neighbors(cur).empty()) continue;
      edge_step_[edge_offsets_[static_cast<std::size_t>(u)] + k] = AliasTable(transition_mass(graph, u, cur, config));
    }
  }
}

Walk WalkSampler::walk(int start, int walk_index) const {
  auto rng = walk_rng(config_.seed, start, walk_index);
  Walk w;
  w.reserve(static_cast<std::size_t>(config_.walk_length));
  w.push_back(start);
  const auto& first = first_step_[static_cast<std::size_t>(start)];
  if (first.empty()) return w;
  std::size_t k = first.sample(rng);
  std::size_t edge = edge_offsets_[static_cast<std::size_t>(start)] + k;
  int current = graph_->neighbors(start)[k];
  w.push_back(current);
  while (static_cast<int>(w.size()) < config_.walk_length) {
    const auto& table = edge_step_[edge];
    if (table.empty()) break;
    k = table.sample(rng);
    edge = edge_offsets_[static_cast<std::size_t>(current)] + k;
    current = graph_->neighbors(current)[k];
    w.push_back(current);
  }
  return w;
}

std::vector<Walk> generate_walks(const WalkGraph& graph, const WalkConfig& config, int threads) {
  const WalkSampler sampler(graph, config);
  const int n = graph.node_count();
  const std::size_t total = static_cast<std::size_t>(n) * static_cast<std::size_t>(config.num_walks);
  std::vector<Walk> walks(total);
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const int r = static_cast<int>(i / static_cast<std::size_t>(n));
      const int start = static_cast<int>(i % static_cast<std::size_t>(n));
      walks[i] = sampler.walk(start, r);
    }
  };
  threads = std::max(1, threads);
  if (threads == 1 || total < 2) {
    work(0, total);
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (total + static_cast<std::size_t>(threads) - 1) / static_cast<std::size_t>(threads);
    for (std::size_t b = 0; b < total; b += chunk) pool.emplace_back(work, b, std::min(total, b + chunk));
  }
  return walks;
}

std::optional<int> EmbeddingSpace::index_of(std::string_view label) const {
  const auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) return std::nullopt;
  return static_cast<int>(it - labels.begin());
}

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// log s(x) without overflow for large |x|.
double log_sigmoid(double x) { return x >= 0.0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x)); }

// Plain or relaxed-atomic access to the shared parameter arrays.
template <bool Shared>
struct Param {
  static double load(double& x) {
    if constexpr (Shared) {
      return std::atomic_ref<double>(x).load(std::memory_order_relaxed);
    } else {
      return x;
    }
  }
  static void store(double& x, double v) {
    if constexpr (Shared) {
      std::atomic_ref<double>(x).store(v, std::memory_order_relaxed);
    } else {
      x = v;
    }
  }
};

struct TrainingState {
  int dim;
  std::vector<double> in;
  std::vector<double> out;
  AliasTable noise;
  std::size_t total_tokens;
  const SgnsConfig* config;
};

template <bool Shared>
void train_walks(TrainingState& s, std::span<const Walk> walks, std::size_t token_offset, int epoch,
                 std::mt19937_64& rng) {
  using P = Param<Shared>;
  const int d = s.dim;
  const auto& cfg = *s.config;
  const double lr0 = cfg.learning_rate;
  const double lr_floor = lr0 * cfg.min_learning_rate_fraction;
  const double total = static_cast<double>(s.total_tokens) * cfg.epochs;
  std::vector<double> center(static_cast<std::size_t>(d)), grad(static_cast<std::size_t>(d));
  std::size_t token = token_offset + static_cast<std::size_t>(epoch) * s.total_tokens;

  for (const auto& walk : walks) {
    const int len = static_cast<int>(walk.size());
    for (int i = 0; i < len; ++i, ++token) {
      const double lr = std::max(lr0 * (1.0 - static_cast<double>(token) / total), lr_floor);
      const int u = walk[static_cast<std::size_t>(i)];
      const int lo = std::max(0, i - cfg.window), hi = std::min(len - 1, i + cfg.window);
      for (int j = lo; j <= hi; ++j) {
        if (j == i) continue;
        const int v = walk[static_cast<std::size_t>(j)];
        double* zu = &s.in[static_cast<std::size_t>(u) * static_cast<std::size_t>(d)];
        for (int a = 0; a < d; ++a) {
          center[static_cast<std::size_t>(a)] = P::load(zu[a]);
          grad[static_cast<std::size_t>(a)] = 0.0;
        }
        for (int k = 0; k <= cfg.negatives; ++k) {
          int target = v;
          double label = 1.0;
          if (k > 0) {
            target = static_cast<int>(s.noise.sample(rng));
            if (target == v) continue;
            label = 0.0;
          }
          double* ct = &s.out[static_cast<std::size_t>(target) * static_cast<std::size_t>(d)];
          double dot = 0.0;
          for (int a = 0; a < d; ++a) dot += center[static_cast<std::size_t>(a)] * P::load(ct[a]);
          if (!std::isfinite(dot)) {
            throw NumericalError("sgns: non-finite score at epoch " + std::to_string(epoch) + ", center node " +
                                 std::to_string(u) + ", target node " + std::to_string(target));
          }
          const double g = lr * (label - sigmoid(dot));
          for (int a = 0; a < d; ++a) {
            const double c = P::load(ct[a]);
            grad[static_cast<std::size_t>(a)] += g * c;
            P::store(ct[a], c + g * center[static_cast<std::size_t>(a)]);
          }
        }
        for (int a = 0; a < d; ++a) P::store(zu[a], P::load(zu[a]) + grad[static_cast<std::size_t>(a)]);
      }
    }
  }
}

}  // namespace

EmbeddingSpace train_sgns(std::span<const Walk> walks, const std::vector<std::string>& labels,
                          const SgnsConfig& config) {
  validate(config);
  if (walks.empty()) throw DataError("sgns: no walks");
  const int n = static_cast<int>(labels.size());
  const int d = config.dimension;

  std::vector<double> counts(static_cast<std::size_t>(n), 0.0);
  std::size_t tokens = 0;
  for (const auto& w : walks) {
    for (const int u : w) {
      if (u < 0 || u >= n) throw DataError("sgns: walk references unknown node");
      counts[static_cast<std::size_t>(u)] += 1.0;
    }
    tokens += w.size();
  }
  for (auto& c : counts) c = std::pow(c, 0.75);

  TrainingState s{d, {}, {}, AliasTable(counts), tokens, &config};
  s.in.resize(static_cast<std::size_t>(n) * static_cast<std::size_t>(d));
  s.out.resize(s.in.size());
  std::mt19937_64 init_rng(config.seed);
  std::uniform_real_distribution<double> init(-0.5 / d, 0.5 / d);
  for (auto& x : s.in) x = init(init_rng);
  for (auto& x : s.out) x = init(init_rng);

  if (config.threads == 1) {
    std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
    for (int epoch = 0; epoch < config.epochs; ++epoch) train_walks<false>(s, walks, 0, epoch, rng);
  } else {
    const std::size_t parts = static_cast<std::size_t>(config.threads);
    const std::size_t chunk = (walks.size() + parts - 1) / parts;
    std::vector<std::size_t> token_offsets;
    std::size_t offset = 0;
    for (std::size_t b = 0; b < walks.size(); b += chunk) {
      token_offsets.push_back(offset);
      for (std::size_t i = b; i < std::min(walks.size(), b + chunk); ++i) offset += walks[i].size();
    }
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
      std::vector<std::exception_ptr> errors(token_offsets.size());
      {
        std::vector<std::jthread> pool;
        for (std::size_t part = 0; part < token_offsets.size(); ++part) {
          pool.emplace_back([&, part] {
            try {
              std::mt19937_64 rng(config.seed + 1000003ULL * (part + 1) + 7919ULL * static_cast<std::uint64_t>(epoch));
              const std::size_t b = part * chunk;
              train_walks<true>(s, walks.subspan(b, std::min(chunk, walks.size() - b)), token_offsets[part], epoch, rng);
            } catch (...) {
              errors[part] = std::current_exception();
            }
          });
        }
      }
      for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
      }
    }
  }

  EmbeddingSpace space;
  space.labels = labels;
  space.vectors = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(s.in.data(), n, d);
  space.context_vectors = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(s.out.data(), n, d);
  if (!space.vectors.allFinite() || !space.context_vectors.allFinite()) {
    throw NumericalError("sgns: non-finite embedding after training");
  }
  return space;
}

double sgns_pair_objective(const Eigen::VectorXd& center, const Eigen::VectorXd& context,
                           const std::vector<Eigen::VectorXd>& negatives) {
  double value = log_sigmoid(center.dot(context));
  for (const auto& n : negatives) value += log_sigmoid(-center.dot(n));
  return value;
}

SgnsGradient sgns_pair_gradient(const Eigen::VectorXd& center, const Eigen::VectorXd& context,
                                const std::vector<Eigen::VectorXd>& negatives) {
  SgnsGradient g;
  const double pos = 1.0 - sigmoid(center.dot(context));
  g.center = pos * context;
  g.context = pos * center;
  for (const auto& n : negatives) {
    const double neg = sigmoid(center.dot(n));
    g.center -= neg * n;
    g.negatives.push_back(-neg * center);
  }
  return g;
}

double distance(const EmbeddingSpace& space, std::string_view a, std::string_view b) {
  const auto ia = space.index_of(a);
  const auto ib = space.index_of(b);
  if (!ia) throw DataError("distance: unknown node " + std::string(a));
  if (!ib) throw DataError("distance: unknown node " + std::string(b));
  return (space.vectors.row(*ia) - space.vectors.row(*ib)).norm();
}

std::vector<RankedNode> rank_by_distance(const EmbeddingSpace& space, std::string_view anchor,
                                         const std::vector<std::string>& candidates) {
  std::vector<RankedNode> ranked;
  ranked.reserve(candidates.size());
  for (const auto& c : candidates) ranked.push_back({c, distance(space, anchor, c)});
  std::sort(ranked.begin(), ranked.end(), [](const RankedNode& x, const RankedNode& y) {
    if (x.distance != y.distance) return x.distance < y.distance;
    return x.node < y.node;
  });
  return ranked;
}

void write_embedding(const EmbeddingSpace& space, const std::vector<NodeAttributes>& attributes,
                     const std::filesystem::path& path) {
  std::ostringstream out;
  out << "node,kind,sector";
  for (int a = 1; a <= space.dimension(); ++a) out << ",x" << a;
  out << '\n';
  for (std::size_t i = 0; i < space.labels.size(); ++i) {
    const auto& label = space.labels[i];
    const auto it = std::find_if(attributes.begin(), attributes.end(), [&](const auto& n) { return n.node == label; });
    out << label << ',' << (it != attributes.end() && it->kind == NodeKind::Factor ? "factor" : "stock") << ','
        << (it != attributes.end() && it->sector ? std::string(to_string(*it->sector)) : "");
    for (int a = 0; a < space.dimension(); ++a) out << ',' << csv::format_number(space.vectors(static_cast<Eigen::Index>(i), a));
    out << '\n';
  }
  csv::write_text(path, out.str());
}

EmbeddingFile read_embedding(const std::filesystem::path& path) {
  const auto table = csv::read(path);
  if (table.header.size() < 5 || table.header[0] != "node" || table.header[1] != "kind" || table.header[2] != "sector") {
    throw DataError(path.string() + ": expected node,kind,sector,x1..xd");
  }
  const auto d = static_cast<Eigen::Index>(table.header.size() - 3);
  EmbeddingFile f;
  f.space.vectors.resize(static_cast<Eigen::Index>(table.rows.size()), d);
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    NodeAttributes a;
    a.node = row[0];
    if (row[1] == "factor") {
      a.kind = NodeKind::Factor;
    } else if (row[1] == "stock") {
      a.kind = NodeKind::Stock;
    } else {
      throw DataError(path.string() + ": unknown node kind '" + row[1] + "'");
    }
    if (!row[2].empty()) a.sector = parse_sector(row[2]);
    for (Eigen::Index k = 0; k < d; ++k) {
      f.space.vectors(static_cast<Eigen::Index>(i), k) = csv::parse_number(row[static_cast<std::size_t>(k) + 3]);
    }
    f.space.labels.push_back(a.node);
    f.attributes.push_back(std::move(a));
  }
  return f;
}

}  // namespace nethedge
