#pragma once

#include "gmatch/autodiff.hpp"
#include "gmatch/tensor.hpp"

namespace gmatch {

struct SinkhornConfig {
  int max_iters = 20;
  double tol = 1e-6;
};

struct SinkhornStats {
  int iterations = 0;
  double deviation = 0.0;  // max |row or column sum - 1| when the loop ended
  bool converged = false;
};

enum class SimilarityStage { kRaw, kDoublyStochastic };

// N x N similarity scores kept as log-scores, which makes the alternating
// normalization exact at any score scale (1/tau can push raw exponents far
// beyond double range). Entries of exactly zero are represented as -inf
// log-scores and behave as hard exclusions.
class SimilarityMatrix {
 public:
  SimilarityMatrix() = default;

  static SimilarityMatrix from_scores(const Tensor& linear);
  static SimilarityMatrix from_log_scores(Tensor log_scores,
                                          SimilarityStage stage = SimilarityStage::kRaw);

  int n() const { return log_scores_.rank() == 2 ? log_scores_.dim(0) : 0; }
  SimilarityStage stage() const { return stage_; }
  const Tensor& log_scores() const { return log_scores_; }
  Tensor probabilities() const;  // elementwise exp

 private:
  Tensor log_scores_;
  SimilarityStage stage_ = SimilarityStage::kRaw;
};

struct SinkhornResult {
  SimilarityMatrix matrix;
  SinkhornStats stats;
};

// Alternating row and column normalization to a doubly-stochastic matrix.
// Stops when every row and column sum is within tol of 1, or after
// max_iters rounds (the result is then reported with its achieved
// deviation). Throws NumericError("sinkhorn: non-positive input ...") if a
// whole row or column carries no mass.
SinkhornResult sinkhorn(const SimilarityMatrix& m, const SinkhornConfig& cfg);

// Differentiable version: takes and returns log-scores on the tape and
// unrolls every iteration actually performed, so gradients flow through
// the full normalization. Produces numbers bit-identical to the plain
// path. exp(result) is the doubly-stochastic matrix.
Var sinkhorn_log_op(Record& rec, Var log_scores, const SinkhornConfig& cfg,
                    SinkhornStats* stats = nullptr);

}  // namespace gmatch
