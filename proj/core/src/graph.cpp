#include "gmatch/graph.hpp"

#include <algorithm>

#include "gmatch/error.hpp"

namespace gmatch {

int EdgeFeatures::find(int i, int j) const {
  if (i > j) std::swap(i, j);
  const std::pair<int, int> key{i, j};
  auto it = std::lower_bound(edges.begin(), edges.end(), key);
  if (it == edges.end() || *it != key) return -1;
  return static_cast<int>(it - edges.begin());
}

int KeypointGraph::degree(int i) const {
  int d = 0;
  for (int j = 0; j < n; ++j) d += adjacency.at(i, j) != 0.0 ? 1 : 0;
  return d;
}

std::vector<std::pair<int, int>> KeypointGraph::edge_list() const {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (adjacency.at(i, j) != 0.0) edges.emplace_back(i, j);
    }
  }
  return edges;
}

void validate_graph(const KeypointGraph& g) {
  if (g.coords.rank() != 2 || g.coords.dim(0) != g.n || g.coords.dim(1) != 2) {
    throw NumericError("graph: coords shape " + shape_to_string(g.coords.shape()) + " does not match n=" +
                       std::to_string(g.n));
  }
  if (g.node_features.rank() != 2 || g.node_features.dim(0) != g.n) {
    throw NumericError("graph: node_features shape " + shape_to_string(g.node_features.shape()) +
                       " does not match n=" + std::to_string(g.n));
  }
  if (g.adjacency.rank() != 2 || g.adjacency.dim(0) != g.n || g.adjacency.dim(1) != g.n) {
    throw NumericError("graph: adjacency shape " + shape_to_string(g.adjacency.shape()) +
                       " does not match n=" + std::to_string(g.n));
  }
  if (!g.coords.all_finite() || !g.node_features.all_finite()) {
    throw NumericError("graph: non-finite coordinates or features");
  }
  for (int i = 0; i < g.n; ++i) {
    if (g.adjacency.at(i, i) != 0.0) throw NumericError("graph: adjacency diagonal must be zero");
    for (int j = 0; j < g.n; ++j) {
      const double a = g.adjacency.at(i, j);
      if (a != 0.0 && a != 1.0) throw NumericError("graph: adjacency entries must be 0 or 1");
      if (a != g.adjacency.at(j, i)) throw NumericError("graph: adjacency must be symmetric");
    }
  }
  for (std::size_t e = 0; e < g.edge_features.edges.size(); ++e) {
    const auto [i, j] = g.edge_features.edges[e];
    if (i < 0 || j >= g.n || i >= j) throw NumericError("graph: malformed edge feature key");
    if (g.adjacency.at(i, j) == 0.0) {
      throw NumericError("graph: edge feature attached to a non-edge (" + std::to_string(i) + "," +
                         std::to_string(j) + ")");
    }
    if (e > 0 && !(g.edge_features.edges[e - 1] < g.edge_features.edges[e])) {
      throw NumericError("graph: edge feature keys must be strictly sorted");
    }
  }
  if (!g.edge_features.empty() &&
      g.edge_features.features.dim(0) != static_cast<int>(g.edge_features.edges.size())) {
    throw NumericError("graph: edge feature row count mismatch");
  }
}

KeypointGraph permute_nodes(const KeypointGraph& g, const std::vector<int>& new_index) {
  if (static_cast<int>(new_index.size()) != g.n) {
    throw NumericError("permute_nodes: relabeling size mismatch");
  }
  PermutationMatrix::from_indices(new_index);  // validates

  KeypointGraph out;
  out.n = g.n;
  out.coords = Tensor(Shape{g.n, 2});
  out.node_features = Tensor(Shape{g.n, g.feature_dim()});
  out.adjacency = Tensor(Shape{g.n, g.n});
  for (int i = 0; i < g.n; ++i) {
    const int ni = new_index[i];
    out.coords.at(ni, 0) = g.coords.at(i, 0);
    out.coords.at(ni, 1) = g.coords.at(i, 1);
    for (int d = 0; d < g.feature_dim(); ++d) out.node_features.at(ni, d) = g.node_features.at(i, d);
    for (int j = 0; j < g.n; ++j) out.adjacency.at(ni, new_index[j]) = g.adjacency.at(i, j);
  }
  if (!g.edge_features.empty()) {
    const int de = g.edge_features.dim();
    std::vector<std::pair<std::pair<int, int>, int>> keyed;
    keyed.reserve(g.edge_features.edges.size());
    for (int e = 0; e < g.edge_features.count(); ++e) {
      auto [i, j] = g.edge_features.edges[e];
      int a = new_index[i], b = new_index[j];
      if (a > b) std::swap(a, b);
      keyed.push_back({{a, b}, e});
    }
    std::sort(keyed.begin(), keyed.end());
    out.edge_features.edges.reserve(keyed.size());
    out.edge_features.features = Tensor(Shape{static_cast<int>(keyed.size()), de});
    for (std::size_t e = 0; e < keyed.size(); ++e) {
      out.edge_features.edges.push_back(keyed[e].first);
      for (int d = 0; d < de; ++d) {
        out.edge_features.features.at(static_cast<int>(e), d) =
            g.edge_features.features.at(keyed[e].second, d);
      }
    }
  }
  return out;
}

void validate_pair(const MatchingPair& pair) {
  if (pair.g1.n != pair.g2.n) {
    throw NumericError("pair: graphs have different node counts " + std::to_string(pair.g1.n) + " vs " +
                       std::to_string(pair.g2.n));
  }
  if (pair.gt.n() != pair.g1.n) throw NumericError("pair: ground truth size mismatch");
  validate_graph(pair.g1);
  validate_graph(pair.g2);
}

MatchingPair permute_pair(const MatchingPair& pair, const std::vector<int>& perm1,
                          const std::vector<int>& perm2) {
  MatchingPair out;
  out.g1 = permute_nodes(pair.g1, perm1);
  out.g2 = permute_nodes(pair.g2, perm2);
  std::vector<int> gt(pair.n());
  for (int i = 0; i < pair.n(); ++i) gt[perm1[i]] = perm2[pair.gt(i)];
  out.gt = PermutationMatrix::from_indices(std::move(gt));
  return out;
}

Tensor fully_connected_adjacency(int n) {
  if (n < 1) throw NumericError("fully_connected_adjacency: n must be at least 1");
  Tensor a(Shape{n, n});
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a.at(i, j) = i == j ? 0.0 : 1.0;
  }
  return a;
}

Tensor adjacency_from_edges(int n, const std::vector<std::pair<int, int>>& edges) {
  Tensor a(Shape{n, n});
  for (auto [i, j] : edges) {
    if (i < 0 || j < 0 || i >= n || j >= n || i == j) {
      throw NumericError("adjacency_from_edges: bad edge (" + std::to_string(i) + "," + std::to_string(j) +
                         ")");
    }
    a.at(i, j) = 1.0;
    a.at(j, i) = 1.0;
  }
  return a;
}

}  // namespace gmatch
