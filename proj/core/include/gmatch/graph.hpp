#pragma once

#include <utility>
#include <vector>

#include "gmatch/permutation.hpp"
#include "gmatch/tensor.hpp"

namespace gmatch {

// Per-edge feature vectors, keyed by undirected edges (i < j), kept sorted.
// Edges listed here must also be present in the owning graph's adjacency;
// not every adjacency edge needs a feature.
struct EdgeFeatures {
  std::vector<std::pair<int, int>> edges;
  Tensor features;  // |edges| x dim

  int count() const { return static_cast<int>(edges.size()); }
  int dim() const { return features.rank() == 2 ? features.dim(1) : 0; }
  bool empty() const { return edges.empty(); }
  int find(int i, int j) const;  // index or -1; (i, j) normalized to i < j
};

// One keypoint graph: 2-d node coordinates, node feature vectors and a
// binary symmetric adjacency with a zero diagonal.
struct KeypointGraph {
  int n = 0;
  Tensor coords;         // n x 2, abstract pixels
  Tensor node_features;  // n x d
  Tensor adjacency;      // n x n, entries in {0,1}
  EdgeFeatures edge_features;

  int feature_dim() const { return node_features.rank() == 2 ? node_features.dim(1) : 0; }
  int degree(int i) const;
  std::vector<std::pair<int, int>> edge_list() const;  // undirected, i < j
};

// Throws NumericError if any KeypointGraph invariant is violated.
void validate_graph(const KeypointGraph& g);

// Relabels nodes: node i of the input becomes node new_index[i] of the
// output. Coordinates, features, adjacency and edge features all follow.
KeypointGraph permute_nodes(const KeypointGraph& g, const std::vector<int>& new_index);

// Two graphs plus the ground-truth correspondence: node i of g1 matches
// node gt(i) of g2.
struct MatchingPair {
  KeypointGraph g1;
  KeypointGraph g2;
  PermutationMatrix gt;

  int n() const { return g1.n; }
  bool consistent() const { return g1.n == g2.n && gt.n() == g1.n; }
};

void validate_pair(const MatchingPair& pair);

// Relabels both sides; the ground truth is rewired so the pair still
// matches. Returns the relabeled pair.
MatchingPair permute_pair(const MatchingPair& pair, const std::vector<int>& perm1,
                          const std::vector<int>& perm2);

// Adjacency constructors.
Tensor fully_connected_adjacency(int n);
Tensor adjacency_from_edges(int n, const std::vector<std::pair<int, int>>& edges);

}  // namespace gmatch
