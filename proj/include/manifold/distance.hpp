#pragma once

#include "manifold/core.hpp"

#include <vector>

namespace manifold {

struct Edge {
  Index to;
  double weight;
};

/// Undirected kNN graph. Adjacency lists are sorted by neighbor index and
/// symmetric: (i, j, w) present iff (j, i, w) present.
class NeighborGraph {
 public:
  explicit NeighborGraph(std::vector<std::vector<Edge>> adjacency);

  Index size() const noexcept { return static_cast<Index>(adjacency_.size()); }
  const std::vector<Edge>& neighbors(Index i) const { return adjacency_[static_cast<size_t>(i)]; }
  std::size_t edge_count() const;

 private:
  std::vector<std::vector<Edge>> adjacency_;
};

/// Thrown when shortest paths cannot reach every node. Carries the
/// connected-component label of every node (labels 0..components-1, ordered
/// by smallest member index).
class DisconnectedError : public Error {
 public:
  DisconnectedError(std::vector<int> component_of, int components);

  const std::vector<int>& component_of() const noexcept { return component_of_; }
  int components() const noexcept { return components_; }
  /// Node indices of the largest component, ascending.
  std::vector<Index> largest_component() const;

 private:
  std::vector<int> component_of_;
  int components_;
};

DistanceMatrix pairwise_euclidean(const DataMatrix& x, DistanceScale scale);

/// Distances between every column of `a` and every column of `b`
/// (rows index `a`).
MatrixXd cross_distances(const MatrixXd& a, const MatrixXd& b, DistanceScale scale);

/// Each node links to its k nearest others (ties to the lower index), then the
/// directed edges are symmetrized by union.
NeighborGraph knn_graph(const DistanceMatrix& raw, int k);

/// Indices of the k nearest entries of `row`, excluding `self` when
/// non-negative; ascending by (distance, index).
std::vector<Index> nearest_indices(const VectorXd& row, int k, Index self = -1);

/// Connected component labels (see DisconnectedError).
std::vector<int> connected_components(const NeighborGraph& g, int* count = nullptr);

/// Dijkstra from one source; unreachable nodes are +inf.
VectorXd single_source_shortest_paths(const NeighborGraph& g, Index source);

/// All-pairs shortest paths by Dijkstra per source. Throws DisconnectedError.
DistanceMatrix geodesic_distances(const NeighborGraph& g);

/// Shortest paths from `sources` to every node (rows follow `sources`).
/// Throws DisconnectedError when any node is unreachable.
MatrixXd geodesic_rows(const NeighborGraph& g, const std::vector<Index>& sources);

}  // namespace manifold
