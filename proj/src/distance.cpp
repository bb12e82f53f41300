#include "manifold/distance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

namespace manifold {

NeighborGraph::NeighborGraph(std::vector<std::vector<Edge>> adjacency)
    : adjacency_(std::move(adjacency)) {
  const Index n = size();
  for (Index i = 0; i < n; ++i) {
    auto& list = adjacency_[static_cast<size_t>(i)];
    std::sort(list.begin(), list.end(), [](const Edge& a, const Edge& b) { return a.to < b.to; });
    for (const Edge& e : list) {
      if (e.to < 0 || e.to >= n) throw Error(ErrorCode::ShapeError, "edge target out of range");
      if (e.to == i) throw Error(ErrorCode::InvalidMatrix, "self-loop in neighbor graph");
      if (!(e.weight >= 0.0) || !std::isfinite(e.weight)) {
        throw Error(ErrorCode::InvalidMatrix, "edge weight must be finite and nonnegative");
      }
    }
  }
  for (Index i = 0; i < n; ++i) {
    for (const Edge& e : adjacency_[static_cast<size_t>(i)]) {
      const auto& back = adjacency_[static_cast<size_t>(e.to)];
      auto it = std::lower_bound(back.begin(), back.end(), i,
                                 [](const Edge& a, Index v) { return a.to < v; });
      if (it == back.end() || it->to != i || it->weight != e.weight) {
        throw Error(ErrorCode::InvalidMatrix, "neighbor graph is not symmetric");
      }
    }
  }
}

std::size_t NeighborGraph::edge_count() const {
  std::size_t total = 0;
  for (const auto& list : adjacency_) total += list.size();
  return total / 2;
}

namespace {

std::string describe_components(const std::vector<int>& component_of, int components) {
  std::vector<std::size_t> sizes(static_cast<size_t>(components), 0);
  for (int c : component_of) ++sizes[static_cast<size_t>(c)];
  std::string msg = "neighbor graph has " + std::to_string(components) + " components (sizes";
  for (std::size_t s : sizes) msg += " " + std::to_string(s);
  msg += "); raise k or restrict to the largest component";
  return msg;
}

}  // namespace

DisconnectedError::DisconnectedError(std::vector<int> component_of, int components)
    : Error(ErrorCode::Disconnected, describe_components(component_of, components)),
      component_of_(std::move(component_of)),
      components_(components) {}

std::vector<Index> DisconnectedError::largest_component() const {
  std::vector<std::size_t> sizes(static_cast<size_t>(components_), 0);
  for (int c : component_of_) ++sizes[static_cast<size_t>(c)];
  const int best = static_cast<int>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
  std::vector<Index> out;
  for (std::size_t i = 0; i < component_of_.size(); ++i) {
    if (component_of_[i] == best) out.push_back(static_cast<Index>(i));
  }
  return out;
}

MatrixXd cross_distances(const MatrixXd& a, const MatrixXd& b, DistanceScale scale) {
  if (a.rows() != b.rows()) throw Error(ErrorCode::ShapeError, "point dimensions differ");
  MatrixXd out(a.cols(), b.cols());
  for (Index j = 0; j < b.cols(); ++j) {
    for (Index i = 0; i < a.cols(); ++i) {
      const double sq = (a.col(i) - b.col(j)).squaredNorm();
      out(i, j) = scale == DistanceScale::Squared ? sq : std::sqrt(sq);
    }
  }
  return out;
}

DistanceMatrix pairwise_euclidean(const DataMatrix& x, DistanceScale scale) {
  const Index n = x.size();
  MatrixXd d = MatrixXd::Zero(n, n);
  for (Index j = 1; j < n; ++j) {
    for (Index i = 0; i < j; ++i) {
      const double sq = (x.point(i) - x.point(j)).squaredNorm();
      const double v = scale == DistanceScale::Squared ? sq : std::sqrt(sq);
      d(i, j) = v;
      d(j, i) = v;
    }
  }
  return DistanceMatrix(std::move(d), scale);
}

std::vector<Index> nearest_indices(const VectorXd& row, int k, Index self) {
  std::vector<Index> order;
  order.reserve(static_cast<size_t>(row.size()));
  for (Index j = 0; j < row.size(); ++j) {
    if (j != self) order.push_back(j);
  }
  const auto kk = std::min<std::size_t>(static_cast<size_t>(std::max(k, 0)), order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(kk), order.end(),
                    [&](Index a, Index b) {
                      if (row(a) != row(b)) return row(a) < row(b);
                      return a < b;
                    });
  order.resize(kk);
  return order;
}

NeighborGraph knn_graph(const DistanceMatrix& raw, int k) {
  if (raw.scale() != DistanceScale::Raw) {
    throw Error(ErrorCode::ScaleMismatch, "knn_graph expects RAW distances");
  }
  const Index n = raw.size();
  if (k < 1 || k > n - 1) {
    throw Error(ErrorCode::InvalidK, "k = " + std::to_string(k) + " outside [1, " +
                                         std::to_string(n - 1) + "]");
  }
  std::vector<std::pair<Index, Index>> pairs;
  pairs.reserve(static_cast<size_t>(n) * static_cast<size_t>(k));
  for (Index i = 0; i < n; ++i) {
    const VectorXd row = raw.values().col(i);
    for (Index j : nearest_indices(row, k, i)) pairs.emplace_back(std::min(i, j), std::max(i, j));
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());

  std::vector<std::vector<Edge>> adjacency(static_cast<size_t>(n));
  for (const auto& [lo, hi] : pairs) {
    const double w = raw(lo, hi);
    adjacency[static_cast<size_t>(lo)].push_back({hi, w});
    adjacency[static_cast<size_t>(hi)].push_back({lo, w});
  }
  return NeighborGraph(std::move(adjacency));
}

std::vector<int> connected_components(const NeighborGraph& g, int* count) {
  const Index n = g.size();
  std::vector<int> label(static_cast<size_t>(n), -1);
  int next = 0;
  std::vector<Index> stack;
  for (Index s = 0; s < n; ++s) {
    if (label[static_cast<size_t>(s)] >= 0) continue;
    label[static_cast<size_t>(s)] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      const Index u = stack.back();
      stack.pop_back();
      for (const Edge& e : g.neighbors(u)) {
        if (label[static_cast<size_t>(e.to)] < 0) {
          label[static_cast<size_t>(e.to)] = next;
          stack.push_back(e.to);
        }
      }
    }
    ++next;
  }
  if (count) *count = next;
  return label;
}

VectorXd single_source_shortest_paths(const NeighborGraph& g, Index source) {
  const Index n = g.size();
  if (source < 0 || source >= n) throw Error(ErrorCode::ShapeError, "source out of range");
  VectorXd dist = VectorXd::Constant(n, std::numeric_limits<double>::infinity());
  using Item = std::pair<double, Index>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist(source) = 0.0;
  heap.push({0.0, source});
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (d > dist(u)) continue;
    for (const Edge& e : g.neighbors(u)) {
      const double cand = d + e.weight;
      if (cand < dist(e.to)) {
        dist(e.to) = cand;
        heap.push({cand, e.to});
      }
    }
  }
  return dist;
}

namespace {

[[noreturn]] void throw_disconnected(const NeighborGraph& g) {
  int count = 0;
  auto labels = connected_components(g, &count);
  throw DisconnectedError(std::move(labels), count);
}

}  // namespace

MatrixXd geodesic_rows(const NeighborGraph& g, const std::vector<Index>& sources) {
  MatrixXd out(static_cast<Index>(sources.size()), g.size());
  for (std::size_t r = 0; r < sources.size(); ++r) {
    VectorXd d = single_source_shortest_paths(g, sources[r]);
    if (!d.allFinite()) throw_disconnected(g);
    out.row(static_cast<Index>(r)) = d.transpose();
  }
  return out;
}

DistanceMatrix geodesic_distances(const NeighborGraph& g) {
  const Index n = g.size();
  MatrixXd d = MatrixXd::Zero(n, n);
  for (Index s = 0; s < n; ++s) {
    VectorXd row = single_source_shortest_paths(g, s);
    if (!row.allFinite()) throw_disconnected(g);
    // keep the upper triangle from the lower-index source for exact symmetry
    for (Index j = s + 1; j < n; ++j) {
      d(s, j) = row(j);
      d(j, s) = row(j);
    }
  }
  return DistanceMatrix(std::move(d), DistanceScale::Raw);
}

}  // namespace manifold
