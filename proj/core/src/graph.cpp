#include "nethedge/graph.hpp"

#include "nethedge/csv.hpp"
#include "nethedge/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <queue>
#include <sstream>

namespace nethedge {

CorrelationMatrix pearson_matrix(const Eigen::MatrixXd& columns, std::vector<std::string> labels) {
  const Eigen::Index t = columns.rows();
  const Eigen::Index n = columns.cols();
  if (static_cast<Eigen::Index>(labels.size()) != n) throw DataError("pearson: label count mismatch");
  if (t < kMinCorrelationObservations) throw DataError("pearson: need at least 30 observations");
  if (!columns.allFinite()) throw DataError("pearson: non-finite input");

  Eigen::MatrixXd z = columns.rowwise() - columns.colwise().mean();
  for (Eigen::Index j = 0; j < n; ++j) {
    const double norm = z.col(j).norm();
    if (!(norm > 0.0)) throw DataError("pearson: constant column " + labels[static_cast<std::size_t>(j)]);
    z.col(j) /= norm;
  }
  Eigen::MatrixXd c(n, n);
  c.noalias() = z.transpose() * z;
  for (Eigen::Index i = 0; i < n; ++i) {
    c(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = std::clamp(c(i, j), -1.0, 1.0);
      c(i, j) = v;
      c(j, i) = v;
    }
  }
  return {std::move(labels), std::move(c)};
}

CorrelationMatrix pearson_matrix(const TimeSeriesPanel& panel, const FactorPanel& extra,
                                 const std::vector<std::string>& extra_columns) {
  if (panel.dates() != extra.dates()) throw DataError("pearson: extra columns are on different dates");
  Eigen::MatrixXd cols(panel.rows(), panel.cols() + static_cast<Eigen::Index>(extra_columns.size()));
  cols.leftCols(panel.cols()) = panel.values();
  auto labels = panel.labels();
  for (std::size_t j = 0; j < extra_columns.size(); ++j) {
    cols.col(panel.cols() + static_cast<Eigen::Index>(j)) = extra.column(extra_columns[j]);
    labels.push_back(extra_columns[j]);
  }
  return pearson_matrix(cols, std::move(labels));
}

std::optional<int> WeightedGraph::index_of(std::string_view label) const {
  const auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) return std::nullopt;
  return static_cast<int>(it - labels.begin());
}

GainTransform parse_gain(std::string_view text) {
  if (text == "raw") return GainTransform::Raw;
  if (text == "abs") return GainTransform::Absolute;
  if (text == "square") return GainTransform::Square;
  throw ConfigError("unknown gain transform: " + std::string(text));
}

std::string_view to_string(GainTransform gain) {
  switch (gain) {
    case GainTransform::Raw: return "raw";
    case GainTransform::Absolute: return "abs";
    case GainTransform::Square: return "square";
  }
  return "square";
}

Eigen::MatrixXd gain_matrix(const Eigen::MatrixXd& correlation, GainTransform gain) {
  Eigen::MatrixXd g;
  switch (gain) {
    case GainTransform::Raw: g = correlation; break;
    case GainTransform::Absolute: g = correlation.cwiseAbs(); break;
    case GainTransform::Square: g = correlation.cwiseProduct(correlation); break;
  }
  g.diagonal().setZero();
  return g;
}

namespace {

double tetra_weight(const Eigen::MatrixXd& g, const std::array<int, 4>& s) {
  double w = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) w += g(s[i], s[j]);
  return w;
}

// Vertices sorted ascending so the summation order is canonical.
double face_gain(const Eigen::MatrixXd& g, int v, const Triangle& f) {
  return g(v, f[0]) + g(v, f[1]) + g(v, f[2]);
}

struct Candidate {
  double gain;
  int vertex;
  int face;
};

// Max-heap order: larger gain, then smaller vertex, then older face.
struct CandidateLess {
  bool operator()(const Candidate& a, const Candidate& b) const {
    if (a.gain != b.gain) return a.gain < b.gain;
    if (a.vertex != b.vertex) return a.vertex > b.vertex;
    return a.face > b.face;
  }
};

Triangle sorted(int a, int b, int c) {
  Triangle t{a, b, c};
  std::sort(t.begin(), t.end());
  return t;
}

}  // namespace

std::array<int, 4> tmfg_seed(const Eigen::MatrixXd& gains) {
  const int n = static_cast<int>(gains.rows());
  const Eigen::VectorXd row_sums = gains.rowwise().sum();
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return row_sums(a) > row_sums(b); });
  std::array<int, 4> seed{order[0], order[1], order[2], order[3]};

  double current = tetra_weight(gains, seed);
  while (true) {
    double best = current;
    int best_pos = -1, best_vertex = -1;
    for (int pos = 0; pos < 4; ++pos) {
      for (int v = 0; v < n; ++v) {
        if (std::find(seed.begin(), seed.end(), v) != seed.end()) continue;
        auto trial = seed;
        trial[static_cast<std::size_t>(pos)] = v;
        const double w = tetra_weight(gains, trial);
        if (w > best) {
          best = w;
          best_pos = pos;
          best_vertex = v;
        }
      }
    }
    if (best_pos < 0) break;
    seed[static_cast<std::size_t>(best_pos)] = best_vertex;
    current = best;
  }
  std::sort(seed.begin(), seed.end());
  return seed;
}

FilteredGraph tmfg(const CorrelationMatrix& corr, GainTransform gain) {
  const int n = static_cast<int>(corr.values.rows());
  if (n < 4) throw DataError("tmfg: need at least 4 nodes");
  if (corr.values.cols() != n || static_cast<int>(corr.labels.size()) != n) {
    throw DataError("tmfg: correlation matrix is not square or labels mismatch");
  }
  if (corr.values.hasNaN()) throw DataError("tmfg: NaN in correlation matrix");

  const Eigen::MatrixXd g = gain_matrix(corr.values, gain);
  FilteredGraph out;
  out.graph.labels = corr.labels;
  out.seed = tmfg_seed(g);

  std::vector<char> placed(static_cast<std::size_t>(n), 0);
  std::vector<Triangle> faces;  // indexed by creation order
  std::vector<char> alive;
  auto add_edge = [&](int a, int b) {
    if (a > b) std::swap(a, b);
    out.graph.edges.push_back({a, b, corr.values(a, b)});
  };

  const auto& s = out.seed;
  for (int i = 0; i < 4; ++i) {
    placed[static_cast<std::size_t>(s[static_cast<std::size_t>(i)])] = 1;
    for (int j = i + 1; j < 4; ++j) add_edge(s[static_cast<std::size_t>(i)], s[static_cast<std::size_t>(j)]);
  }
  for (const Triangle& f : {Triangle{s[0], s[1], s[2]}, Triangle{s[0], s[1], s[3]}, Triangle{s[0], s[2], s[3]},
                            Triangle{s[1], s[2], s[3]}}) {
    faces.push_back(f);
    alive.push_back(1);
  }

  std::priority_queue<Candidate, std::vector<Candidate>, CandidateLess> heap;
  auto push_best = [&](int face) {
    int best_v = -1;
    double best_g = 0.0;
    for (int v = 0; v < n; ++v) {
      if (placed[static_cast<std::size_t>(v)]) continue;
      const double gv = face_gain(g, v, faces[static_cast<std::size_t>(face)]);
      if (best_v < 0 || gv > best_g) {
        best_v = v;
        best_g = gv;
      }
    }
    if (best_v >= 0) heap.push({best_g, best_v, face});
  };
  for (int f = 0; f < 4; ++f) push_best(f);

  int remaining = n - 4;
  while (remaining > 0) {
    const Candidate c = heap.top();
    heap.pop();
    if (!alive[static_cast<std::size_t>(c.face)]) continue;
    if (placed[static_cast<std::size_t>(c.vertex)]) {
      push_best(c.face);
      continue;
    }
    const Triangle f = faces[static_cast<std::size_t>(c.face)];
    placed[static_cast<std::size_t>(c.vertex)] = 1;
    alive[static_cast<std::size_t>(c.face)] = 0;
    --remaining;
    out.insertions.push_back({c.vertex, f, c.gain});
    for (const int u : f) add_edge(c.vertex, u);
    for (const Triangle& nf : {sorted(c.vertex, f[0], f[1]), sorted(c.vertex, f[0], f[2]), sorted(c.vertex, f[1], f[2])}) {
      faces.push_back(nf);
      alive.push_back(1);
      if (remaining > 0) push_best(static_cast<int>(faces.size()) - 1);
    }
  }

  for (std::size_t f = 0; f < faces.size(); ++f) {
    if (alive[f]) out.faces.push_back(faces[f]);
  }
  return out;
}

namespace {

std::string_view kind_name(NodeKind k) { return k == NodeKind::Factor ? "factor" : "stock"; }

}  // namespace

void write_edge_list(const WeightedGraph& graph, const std::filesystem::path& path) {
  std::ostringstream out;
  out << "src,dst,weight\n";
  for (const auto& e : graph.edges) {
    out << graph.labels[static_cast<std::size_t>(e.a)] << ',' << graph.labels[static_cast<std::size_t>(e.b)] << ','
        << csv::format_number(e.weight) << '\n';
  }
  csv::write_text(path, out.str());
}

void write_node_attributes(const std::vector<NodeAttributes>& nodes, const std::filesystem::path& path) {
  std::ostringstream out;
  out << "node,kind,sector\n";
  for (const auto& n : nodes) {
    out << n.node << ',' << kind_name(n.kind) << ',' << (n.sector ? std::string(to_string(*n.sector)) : "") << '\n';
  }
  csv::write_text(path, out.str());
}

WeightedGraph read_edge_list(const std::filesystem::path& path, const std::vector<NodeAttributes>* nodes) {
  const auto table = csv::read(path);
  const int cs = table.column("src"), cd = table.column("dst"), cw = table.column("weight");
  if (cs < 0 || cd < 0 || cw < 0) throw DataError(path.string() + ": expected columns src,dst,weight");
  WeightedGraph g;
  std::map<std::string, int, std::less<>> index;
  auto intern = [&](const std::string& label, bool may_add) {
    const auto it = index.find(label);
    if (it != index.end()) return it->second;
    if (!may_add) throw DataError(path.string() + ": edge references unknown node " + label);
    const int id = static_cast<int>(g.labels.size());
    g.labels.push_back(label);
    index.emplace(label, id);
    return id;
  };
  if (nodes) {
    for (const auto& n : *nodes) intern(n.node, true);
  }
  for (const auto& row : table.rows) {
    int a = intern(row[static_cast<std::size_t>(cs)], nodes == nullptr);
    int b = intern(row[static_cast<std::size_t>(cd)], nodes == nullptr);
    if (a == b) throw DataError(path.string() + ": self loop on " + row[static_cast<std::size_t>(cs)]);
    if (a > b) std::swap(a, b);
    const double w = csv::parse_number(row[static_cast<std::size_t>(cw)]);
    if (!std::isfinite(w)) throw DataError(path.string() + ": non-finite edge weight");
    g.edges.push_back({a, b, w});
  }
  return g;
}

std::vector<NodeAttributes> read_node_attributes(const std::filesystem::path& path) {
  const auto table = csv::read(path);
  const int cn = table.column("node"), ck = table.column("kind"), cs = table.column("sector");
  if (cn < 0 || ck < 0) throw DataError(path.string() + ": expected columns node,kind[,sector]");
  std::vector<NodeAttributes> nodes;
  for (const auto& row : table.rows) {
    NodeAttributes a;
    a.node = row[static_cast<std::size_t>(cn)];
    const auto& kind = row[static_cast<std::size_t>(ck)];
    if (kind == "stock") {
      a.kind = NodeKind::Stock;
    } else if (kind == "factor") {
      a.kind = NodeKind::Factor;
    } else {
      throw DataError(path.string() + ": unknown node kind '" + kind + "'");
    }
    if (cs >= 0 && !row[static_cast<std::size_t>(cs)].empty()) a.sector = parse_sector(row[static_cast<std::size_t>(cs)]);
    nodes.push_back(std::move(a));
  }
  return nodes;
}

}  // namespace nethedge
