#pragma once

#include <span>
#include <vector>

namespace gmatch::numeric {

// Sums the buffer in a value-canonical order: summands are sorted by value
// (with a bit-level total order for ties), so any permutation of the same
// multiset produces the bit-identical result. Used by reductions that must
// be invariant under node relabeling. Mutates the buffer.
double canonical_sum(std::span<double> buf);

// Plain left-to-right accumulation.
double sum(std::span<const double> buf);

// c[n x p] += a[n x k] * b[k x p], row-major, i-k-j loop order so every
// output element accumulates over k in a fixed order.
void matmul_acc(const double* a, const double* b, double* c, int n, int k, int p);

// Same contraction but each output element is reduced with canonical_sum,
// making the result invariant to a simultaneous permutation of the
// contracted index in both operands.
void matmul_canonical(const double* a, const double* b, double* c, int n, int k, int p);

// da[n x k] += dc[n x p] * b^T; db[k x p] += a^T * dc.
void matmul_grad_a_acc(const double* dc, const double* b, double* da, int n, int k, int p);
void matmul_grad_b_acc(const double* a, const double* dc, double* db, int n, int k, int p);

// log(sum_j exp(x_j)) over a row, stabilized by the row max; the sum of
// exponentials is reduced canonically so it is order-invariant.
double log_sum_exp(std::span<const double> row, std::vector<double>& scratch);

}  // namespace gmatch::numeric
