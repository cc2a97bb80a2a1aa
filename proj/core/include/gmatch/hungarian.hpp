#pragma once

#include "gmatch/permutation.hpp"
#include "gmatch/tensor.hpp"

namespace gmatch {

// Exact linear assignment: returns the permutation X maximizing
// sum_ij scores[i][j] X[i][j], by the O(N^3) potential (shortest
// augmenting path) method. Rows are processed in increasing index and
// ties pick the lowest column, so the result is deterministic.
PermutationMatrix hungarian(const Tensor& scores);

// Objective of an assignment under a score matrix, summed in row order.
double assignment_objective(const Tensor& scores, const PermutationMatrix& p);

}  // namespace gmatch
