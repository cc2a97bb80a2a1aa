#include "gmatch/synthetic.hpp"

#include <cmath>
#include <numbers>

#include "gmatch/delaunay.hpp"
#include "gmatch/error.hpp"

namespace gmatch {

void validate_config(const SyntheticConfig& cfg) {
  if (cfg.k_pt < 3) throw ConfigError("synthetic: k_pt must be at least 3 (Delaunay needs a triangle)");
  if (cfg.sigma_feat < 0 || cfg.sigma_coo < 0) throw ConfigError("synthetic: sigmas must be nonnegative");
  if (cfg.node_feature_dim < 1) throw ConfigError("synthetic: node_feature_dim must be positive");
  if (cfg.edge_feature_dim < 0) throw ConfigError("synthetic: edge_feature_dim must be nonnegative");
  if (cfg.scale_min <= 0 || cfg.scale_max < cfg.scale_min) throw ConfigError("synthetic: bad scale range");
  if (cfg.max_retries < 1) throw ConfigError("synthetic: max_retries must be positive");
}

namespace {

struct Affine {
  double cos_t = 1.0, sin_t = 0.0, scale = 1.0, tx = 0.0, ty = 0.0;
  double cx = 0.0, cy = 0.0;
  bool exact_identity = false;

  void apply(double x, double y, double& ox, double& oy) const {
    if (exact_identity) {
      ox = x;
      oy = y;
      return;
    }
    const double dx = x - cx, dy = y - cy;
    ox = scale * (cos_t * dx - sin_t * dy) + cx + tx;
    oy = scale * (sin_t * dx + cos_t * dy) + cy + ty;
  }
};

Affine draw_affine(const SyntheticConfig& cfg, Rng& rng, double cx, double cy) {
  Affine a;
  const double theta_deg = rng.uniform(-cfg.rotation_range_deg, cfg.rotation_range_deg);
  a.scale = rng.uniform(cfg.scale_min, cfg.scale_max);
  a.tx = rng.uniform(-cfg.translation_range, cfg.translation_range);
  a.ty = rng.uniform(-cfg.translation_range, cfg.translation_range);
  a.cx = cx;
  a.cy = cy;
  const double theta = theta_deg * std::numbers::pi / 180.0;
  a.cos_t = std::cos(theta);
  a.sin_t = std::sin(theta);
  a.exact_identity = theta_deg == 0.0 && a.scale == 1.0 && a.tx == 0.0 && a.ty == 0.0;
  return a;
}

// Disturbed copy of the latent graph, in latent node order.
KeypointGraph disturb(const SyntheticConfig& cfg, Rng& rng, const Tensor& latent_coords,
                      const Tensor& latent_features, const EdgeFeatures& latent_edges, double cx,
                      double cy) {
  const int k = cfg.k_pt;
  KeypointGraph g;
  g.n = k;
  g.coords = Tensor(Shape{k, 2});
  const Affine affine = draw_affine(cfg, rng, cx, cy);
  for (int i = 0; i < k; ++i) {
    double x, y;
    affine.apply(latent_coords.at(i, 0), latent_coords.at(i, 1), x, y);
    g.coords.at(i, 0) = x + cfg.sigma_coo * rng.normal();
    g.coords.at(i, 1) = y + cfg.sigma_coo * rng.normal();
  }
  g.node_features = latent_features;
  for (auto& v : g.node_features.values()) v += cfg.sigma_feat * rng.normal();
  g.adjacency = delaunay_adjacency(g.coords);

  if (cfg.edge_feature_dim > 0) {
    // Features live on latent edges; an edge of the disturbed topology
    // carries one only when the latent graph also has that edge.
    std::vector<int> latent_row;
    std::vector<std::pair<int, int>> kept;
    for (auto [i, j] : g.edge_list()) {
      const int r = latent_edges.find(i, j);
      if (r >= 0) {
        kept.emplace_back(i, j);
        latent_row.push_back(r);
      }
    }
    const int de = cfg.edge_feature_dim;
    g.edge_features.edges = std::move(kept);
    g.edge_features.features = Tensor(Shape{static_cast<int>(g.edge_features.edges.size()), de});
    for (int e = 0; e < g.edge_features.count(); ++e) {
      for (int d = 0; d < de; ++d) {
        g.edge_features.features.at(e, d) =
            latent_edges.features.at(latent_row[e], d) + cfg.sigma_feat * rng.normal();
      }
    }
  }
  return g;
}

}  // namespace

SyntheticSample generate_synthetic_sample(const SyntheticConfig& cfg, Rng& rng) {
  validate_config(cfg);
  std::string last_error;
  for (int attempt = 0; attempt < cfg.max_retries; ++attempt) {
    try {
      SyntheticSample s;
      const int k = cfg.k_pt;
      s.latent_coords = Tensor(Shape{k, 2});
      for (auto& v : s.latent_coords.values()) v = rng.uniform(0.0, 256.0);
      s.latent_node_features = Tensor(Shape{k, cfg.node_feature_dim});
      for (auto& v : s.latent_node_features.values()) v = rng.uniform(-1.0, 1.0);

      const DelaunayTriangulation latent_tri = delaunay_triangulate(s.latent_coords);
      if (cfg.edge_feature_dim > 0) {
        s.latent_edge_features.edges = latent_tri.edges;
        s.latent_edge_features.features =
            Tensor(Shape{static_cast<int>(latent_tri.edges.size()), cfg.edge_feature_dim});
        for (auto& v : s.latent_edge_features.features.values()) v = rng.uniform(-1.0, 1.0);
      }

      double cx = 0.0, cy = 0.0;
      for (int i = 0; i < k; ++i) {
        cx += s.latent_coords.at(i, 0);
        cy += s.latent_coords.at(i, 1);
      }
      cx /= k;
      cy /= k;

      s.pair.g1 = disturb(cfg, rng, s.latent_coords, s.latent_node_features, s.latent_edge_features, cx, cy);
      KeypointGraph g2 = disturb(cfg, rng, s.latent_coords, s.latent_node_features, s.latent_edge_features,
                                 cx, cy);
      const std::vector<int> shuffle = rng.permutation(k);
      s.pair.g2 = permute_nodes(g2, shuffle);
      s.pair.gt = PermutationMatrix::from_indices(shuffle);
      return s;
    } catch (const NumericError& e) {
      last_error = e.what();
    }
  }
  throw NumericError("synthetic: still degenerate after " + std::to_string(cfg.max_retries) +
                     " retries (" + last_error + ")");
}

MatchingPair generate_synthetic_pair(const SyntheticConfig& cfg, Rng& rng) {
  return generate_synthetic_sample(cfg, rng).pair;
}

}  // namespace gmatch
