#pragma once

#include <nethedge/graph.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <optional>
#include <map>
#include <queue>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace nethedge::testing {

using EdgeSet = std::set<std::pair<int, int>>;

inline std::pair<int, int> edge_key(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

inline EdgeSet edge_set(const WeightedGraph& g) {
  EdgeSet s;
  for (const auto& e : g.edges) s.insert(edge_key(e.a, e.b));
  return s;
}

inline Triangle sorted(int a, int b, int c) {
  Triangle t{a, b, c};
  std::sort(t.begin(), t.end());
  return t;
}

inline double face_gain(const Eigen::MatrixXd& g, int v, const Triangle& f) {
  return g(v, f[0]) + g(v, f[1]) + g(v, f[2]);
}

inline double clique_weight(const Eigen::MatrixXd& g, const std::array<int, 4>& s) {
  double w = 0.0;
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) w += g(s[i], s[j]);
  }
  return w;
}

// Seed by the documented rule, brute force: top-4 row sums (ties to the
// smaller index), then repeatedly apply the single swap that raises the
// tetrahedron weight most (first found on ties) until none does.
inline std::array<int, 4> oracle_seed(const Eigen::MatrixXd& g) {
  const int n = static_cast<int>(g.rows());
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return g.row(a).sum() > g.row(b).sum(); });
  std::array<int, 4> s{idx[0], idx[1], idx[2], idx[3]};
  for (;;) {
    const double cur = clique_weight(g, s);
    double best = cur;
    std::optional<std::array<int, 4>> next;
    for (int slot = 0; slot < 4; ++slot) {
      for (int v = 0; v < n; ++v) {
        if (std::find(s.begin(), s.end(), v) != s.end()) continue;
        auto t = s;
        t[slot] = v;
        const double w = clique_weight(g, t);
        if (w > best) {
          best = w;
          next = t;
        }
      }
    }
    if (!next) break;
    s = *next;
  }
  std::sort(s.begin(), s.end());
  return s;
}

struct OracleResult {
  EdgeSet edges;
  std::vector<Insertion> insertions;
};

// Exhaustive greedy: every step scans every (unplaced vertex, live face)
// pair; ties go to the smaller vertex, then the earlier-created face.
inline OracleResult oracle_tmfg(const Eigen::MatrixXd& g, std::array<int, 4> seed) {
  const int n = static_cast<int>(g.rows());
  OracleResult out;
  std::vector<bool> placed(n, false);
  for (int i = 0; i < 4; ++i) {
    placed[seed[i]] = true;
    for (int j = i + 1; j < 4; ++j) out.edges.insert(edge_key(seed[i], seed[j]));
  }
  std::vector<std::pair<Triangle, bool>> faces;  // creation order, alive flag
  faces.push_back({sorted(seed[0], seed[1], seed[2]), true});
  faces.push_back({sorted(seed[0], seed[1], seed[3]), true});
  faces.push_back({sorted(seed[0], seed[2], seed[3]), true});
  faces.push_back({sorted(seed[1], seed[2], seed[3]), true});
  for (int step = 4; step < n; ++step) {
    int bv = -1;
    std::size_t bf = 0;
    double best = 0.0;
    for (int v = 0; v < n; ++v) {
      if (placed[v]) continue;
      for (std::size_t f = 0; f < faces.size(); ++f) {
        if (!faces[f].second) continue;
        const double gain = face_gain(g, v, faces[f].first);
        if (bv < 0 || gain > best) {
          bv = v;
          bf = f;
          best = gain;
        }
      }
    }
    const Triangle f = faces[bf].first;
    faces[bf].second = false;
    faces.push_back({sorted(bv, f[0], f[1]), true});
    faces.push_back({sorted(bv, f[0], f[2]), true});
    faces.push_back({sorted(bv, f[1], f[2]), true});
    for (int u : f) out.edges.insert(edge_key(bv, u));
    placed[bv] = true;
    out.insertions.push_back({bv, f, best});
  }
  return out;
}

// Structural audit of a TMFG result; returns the first violation or "".
inline std::string audit_tmfg(const FilteredGraph& fg, const Eigen::MatrixXd& corr, GainTransform gain) {
  const int n = static_cast<int>(corr.rows());
  const Eigen::MatrixXd g = gain_matrix(corr, gain);
  const auto& edges = fg.graph.edges;
  if (static_cast<int>(edges.size()) != 3 * (n - 2)) return "edge count " + std::to_string(edges.size());
  if (static_cast<int>(edges.size()) != 3 * n - 6) return "Euler bound";
  if (static_cast<int>(fg.faces.size()) != 2 * n - 4) return "face count " + std::to_string(fg.faces.size());
  for (const auto& e : edges) {
    if (!(e.a < e.b)) return "edge endpoints not ordered";
    if (e.weight != corr(e.a, e.b)) return "edge weight differs from correlation";
  }

  // Replay the insertions against the live face set.
  std::vector<bool> placed(n, false);
  EdgeSet expected;
  const auto& s = fg.seed;
  for (int i = 0; i < 4; ++i) {
    placed[s[i]] = true;
    for (int j = i + 1; j < 4; ++j) expected.insert(edge_key(s[i], s[j]));
  }
  std::set<Triangle> live{sorted(s[0], s[1], s[2]), sorted(s[0], s[1], s[3]), sorted(s[0], s[2], s[3]),
                          sorted(s[1], s[2], s[3])};
  if (static_cast<int>(fg.insertions.size()) != n - 4) return "insertion count";
  for (const auto& ins : fg.insertions) {
    if (ins.vertex < 0 || ins.vertex >= n || placed[ins.vertex]) return "vertex inserted twice";
    if (!live.count(ins.face)) return "insertion into a dead face";
    if (std::abs(face_gain(g, ins.vertex, ins.face) - ins.gain) > 1e-12) return "recorded gain mismatch";
    for (int v = 0; v < n; ++v) {
      if (placed[v]) continue;
      for (const auto& f : live) {
        if (face_gain(g, v, f) > ins.gain + 1e-12) return "greedy step not optimal";
      }
    }
    live.erase(ins.face);
    const auto& f = ins.face;
    live.insert(sorted(ins.vertex, f[0], f[1]));
    live.insert(sorted(ins.vertex, f[0], f[2]));
    live.insert(sorted(ins.vertex, f[1], f[2]));
    for (int u : f) expected.insert(edge_key(ins.vertex, u));  // degree 3 at insertion
    placed[ins.vertex] = true;
  }
  if (expected != edge_set(fg.graph)) return "edges differ from insertion record";
  if (std::set<Triangle>(fg.faces.begin(), fg.faces.end()) != live) return "final faces differ from replay";

  std::map<std::pair<int, int>, int> per_edge;
  for (const auto& f : fg.faces) {
    for (auto k : {edge_key(f[0], f[1]), edge_key(f[0], f[2]), edge_key(f[1], f[2])}) {
      if (!expected.count(k)) return "face uses a missing edge";
      if (++per_edge[k] > 2) return "edge in more than two faces";
    }
  }

  std::vector<std::vector<int>> adj(n);
  for (const auto& e : edges) {
    adj[e.a].push_back(e.b);
    adj[e.b].push_back(e.a);
  }
  std::vector<bool> seen(n, false);
  std::queue<int> q;
  q.push(s[0]);
  seen[s[0]] = true;
  int count = 1;
  while (!q.empty()) {
    const int u = q.front();
    q.pop();
    for (int v : adj[u]) {
      if (!seen[v]) {
        seen[v] = true;
        ++count;
        q.push(v);
      }
    }
  }
  if (count != n) return "graph not connected";
  return "";
}

inline Eigen::MatrixXd random_correlation(int n, int t, std::mt19937_64& rng) {
  std::normal_distribution<double> z(0.0, 1.0);
  Eigen::MatrixXd x(t, n);
  Eigen::VectorXd common(t);
  for (int i = 0; i < t; ++i) common(i) = z(rng);
  for (int j = 0; j < n; ++j) {
    const double load = std::uniform_real_distribution<double>(-0.8, 0.8)(rng);
    for (int i = 0; i < t; ++i) x(i, j) = load * common(i) + z(rng);
  }
  const Eigen::MatrixXd c = x.rowwise() - x.colwise().mean();
  const Eigen::VectorXd sd = c.colwise().norm();
  Eigen::MatrixXd r = (c.transpose() * c).array() / (sd * sd.transpose()).array();
  r.diagonal().setOnes();
  return r;
}

}  // namespace nethedge::testing
