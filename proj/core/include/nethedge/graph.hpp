#pragma once

#include "nethedge/data.hpp"

#include <Eigen/Dense>

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace nethedge {

/// Symmetric Pearson correlation matrix with unit diagonal.
struct CorrelationMatrix {
  std::vector<std::string> labels;
  Eigen::MatrixXd values;
};

inline constexpr Eigen::Index kMinCorrelationObservations = 30;

/// Correlation of the given columns (one series per column). Throws
/// DataError for fewer than 30 observations, a constant column or
/// non-finite input.
CorrelationMatrix pearson_matrix(const Eigen::MatrixXd& columns, std::vector<std::string> labels);

/// Correlation over the panel's columns followed by `extra_columns` taken
/// from `extra` (both on the same dates).
CorrelationMatrix pearson_matrix(const TimeSeriesPanel& panel, const FactorPanel& extra,
                                 const std::vector<std::string>& extra_columns);

struct Edge {
  int a = 0;  ///< a < b
  int b = 0;
  double weight = 0.0;
};

struct WeightedGraph {
  std::vector<std::string> labels;
  std::vector<Edge> edges;

  [[nodiscard]] int node_count() const { return static_cast<int>(labels.size()); }
  [[nodiscard]] std::optional<int> index_of(std::string_view label) const;
};

/// Edge weight transform used for TMFG gains.
enum class GainTransform { Raw, Absolute, Square };

GainTransform parse_gain(std::string_view text);
std::string_view to_string(GainTransform gain);

using Triangle = std::array<int, 3>;

struct Insertion {
  int vertex = 0;
  Triangle face{};  ///< face the vertex was inserted into (sorted)
  double gain = 0.0;
};

/// Triangulated maximally filtered graph. Edges carry the signed
/// correlation; faces are the final triangular faces.
struct FilteredGraph {
  WeightedGraph graph;
  std::array<int, 4> seed{};
  std::vector<Triangle> faces;
  std::vector<Insertion> insertions;
};

/// Transformed gain matrix g(i, j); the diagonal is zeroed.
Eigen::MatrixXd gain_matrix(const Eigen::MatrixXd& correlation, GainTransform gain);

/// Seed tetrahedron: the four largest row sums of g, then best-improvement
/// single-vertex swaps while the total pairwise weight of the four rises.
/// Returned sorted ascending.
std::array<int, 4> tmfg_seed(const Eigen::MatrixXd& gains);

/// Builds the TMFG: from the seed tetrahedron, repeatedly inserts the
/// (unplaced vertex, face) pair with the largest gain sum, ties resolved by
/// smallest vertex index then earliest-created face. Throws DataError for
/// n < 4 or NaN entries.
FilteredGraph tmfg(const CorrelationMatrix& corr, GainTransform gain = GainTransform::Square);

enum class NodeKind { Stock, Factor };

struct NodeAttributes {
  std::string node;
  NodeKind kind = NodeKind::Stock;
  std::optional<GicsSector> sector;
};

/// Edge list `src,dst,weight`.
void write_edge_list(const WeightedGraph& graph, const std::filesystem::path& path);
/// Node attributes `node,kind,sector`.
void write_node_attributes(const std::vector<NodeAttributes>& nodes, const std::filesystem::path& path);

/// Reads an edge list. Node order follows `nodes` when given, otherwise
/// first appearance in the file.
WeightedGraph read_edge_list(const std::filesystem::path& path,
                             const std::vector<NodeAttributes>* nodes = nullptr);
std::vector<NodeAttributes> read_node_attributes(const std::filesystem::path& path);

}  // namespace nethedge
