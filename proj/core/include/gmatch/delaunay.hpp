#pragma once

#include <array>
#include <vector>

#include "gmatch/tensor.hpp"

namespace gmatch {

// Delaunay triangulation of a planar point set via incremental insertion
// (Bowyer-Watson). The enclosing "super" vertices are handled symbolically
// as points at infinity, so predicates never mix the data scale with a
// large sentinel scale. Cocircular ties keep the earlier diagonal, which
// makes the result deterministic in the input order.
struct DelaunayTriangulation {
  std::vector<std::array<int, 3>> triangles;        // CCW, finite vertices only
  std::vector<std::pair<int, int>> edges;           // undirected, i < j, sorted
};

DelaunayTriangulation delaunay_triangulate(const Tensor& coords);

// N x N binary adjacency where (i, j) = 1 iff i and j share a Delaunay
// edge. Throws NumericError("degenerate point set ...") for duplicated or
// all-collinear inputs.
Tensor delaunay_adjacency(const Tensor& coords);

}  // namespace gmatch
