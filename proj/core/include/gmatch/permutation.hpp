#pragma once

#include <vector>

#include "gmatch/tensor.hpp"

namespace gmatch {

// N x N permutation matrix stored as an index array: row i has its one at
// column index(i). Construction validates the one-to-one property.
class PermutationMatrix {
 public:
  PermutationMatrix() = default;
  static PermutationMatrix identity(int n);
  static PermutationMatrix from_indices(std::vector<int> column_of_row);
  static PermutationMatrix from_dense(const Tensor& m);  // exact 0/1 matrix

  int n() const { return static_cast<int>(map_.size()); }
  int operator()(int row) const { return map_[row]; }
  const std::vector<int>& indices() const { return map_; }

  PermutationMatrix inverse() const;
  Tensor to_dense() const;

  bool operator==(const PermutationMatrix& o) const { return map_ == o.map_; }

 private:
  std::vector<int> map_;
};

// Fraction of rows assigned to their ground-truth column, in {0, 1/N, .., 1}.
double matching_accuracy(const PermutationMatrix& predicted, const PermutationMatrix& ground_truth);

}  // namespace gmatch
