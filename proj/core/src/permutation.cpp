#include "gmatch/permutation.hpp"

#include "gmatch/error.hpp"

namespace gmatch {

PermutationMatrix PermutationMatrix::identity(int n) {
  std::vector<int> v(n);
  for (int i = 0; i < n; ++i) v[i] = i;
  PermutationMatrix p;
  p.map_ = std::move(v);
  return p;
}

PermutationMatrix PermutationMatrix::from_indices(std::vector<int> column_of_row) {
  const int n = static_cast<int>(column_of_row.size());
  std::vector<bool> seen(n, false);
  for (int c : column_of_row) {
    if (c < 0 || c >= n || seen[c]) {
      throw NumericError("PermutationMatrix: index array is not a permutation of 0.." +
                         std::to_string(n - 1));
    }
    seen[c] = true;
  }
  PermutationMatrix p;
  p.map_ = std::move(column_of_row);
  return p;
}

PermutationMatrix PermutationMatrix::from_dense(const Tensor& m) {
  if (m.rank() != 2 || m.dim(0) != m.dim(1)) {
    throw ShapeError("PermutationMatrix: dense form must be square, got " + shape_to_string(m.shape()));
  }
  const int n = m.dim(0);
  std::vector<int> idx(n, -1);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double v = m.at(i, j);
      if (v == 1.0) {
        if (idx[i] != -1) throw NumericError("PermutationMatrix: row " + std::to_string(i) + " has two ones");
        idx[i] = j;
      } else if (v != 0.0) {
        throw NumericError("PermutationMatrix: entry not in {0,1}");
      }
    }
    if (idx[i] == -1) throw NumericError("PermutationMatrix: row " + std::to_string(i) + " has no one");
  }
  return from_indices(std::move(idx));
}

PermutationMatrix PermutationMatrix::inverse() const {
  std::vector<int> inv(map_.size());
  for (int i = 0; i < n(); ++i) inv[map_[i]] = i;
  PermutationMatrix p;
  p.map_ = std::move(inv);
  return p;
}

Tensor PermutationMatrix::to_dense() const {
  Tensor t(Shape{n(), n()});
  for (int i = 0; i < n(); ++i) t.at(i, map_[i]) = 1.0;
  return t;
}

double matching_accuracy(const PermutationMatrix& predicted, const PermutationMatrix& ground_truth) {
  if (predicted.n() != ground_truth.n()) {
    throw ShapeError("matching_accuracy: size mismatch " + std::to_string(predicted.n()) + " vs " +
                     std::to_string(ground_truth.n()));
  }
  if (predicted.n() == 0) throw NumericError("matching_accuracy: empty permutation");
  int hits = 0;
  for (int i = 0; i < predicted.n(); ++i) {
    if (predicted(i) == ground_truth(i)) ++hits;
  }
  return static_cast<double>(hits) / predicted.n();
}

}  // namespace gmatch
