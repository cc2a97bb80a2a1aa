#pragma once

#include <cstdint>

#include "gmatch/graph.hpp"
#include "gmatch/rng.hpp"

namespace gmatch {

// Synthetic matching protocol: a latent graph is drawn with uniform
// coordinates in [0, 256)^2 and uniform features in [-1, 1]; each side of a
// pair is an independent disturbance of it (feature noise, random affine
// plus coordinate noise, rebuilt Delaunay topology, shuffled node order on
// the second graph).
struct SyntheticConfig {
  int k_pt = 20;
  double sigma_feat = 1.5;
  double sigma_coo = 10.0;
  int node_feature_dim = 512;
  int edge_feature_dim = 512;
  double rotation_range_deg = 30.0;  // rotation ~ U(-r, r), about the latent centroid
  double scale_min = 0.8;
  double scale_max = 1.25;
  double translation_range = 20.0;   // per-axis translation ~ U(-t, t)
  std::uint64_t seed = 0;
  int max_retries = 32;
};

void validate_config(const SyntheticConfig& cfg);

struct SyntheticSample {
  MatchingPair pair;
  Tensor latent_coords;         // k x 2
  Tensor latent_node_features;  // k x d
  EdgeFeatures latent_edge_features;
};

// Draws one sample; consumes randomness from `rng` only. Degenerate
// disturbances are retried with fresh draws, bounded by cfg.max_retries.
SyntheticSample generate_synthetic_sample(const SyntheticConfig& cfg, Rng& rng);

MatchingPair generate_synthetic_pair(const SyntheticConfig& cfg, Rng& rng);

}  // namespace gmatch
