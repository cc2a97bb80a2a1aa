#include "gmatch/sinkhorn.hpp"

#include <cmath>

#include "gmatch/error.hpp"
#include "gmatch/numeric.hpp"

namespace gmatch {

SimilarityMatrix SimilarityMatrix::from_scores(const Tensor& linear) {
  if (linear.rank() != 2 || linear.dim(0) != linear.dim(1)) {
    throw ShapeError("SimilarityMatrix: scores must be square, got " + shape_to_string(linear.shape()));
  }
  Tensor logs(linear.shape());
  for (std::int64_t i = 0; i < linear.numel(); ++i) {
    const double v = linear.data()[i];
    if (!(v >= 0.0)) throw NumericError("sinkhorn: non-positive input (negative or NaN score)");
    logs.data()[i] = v == 0.0 ? -HUGE_VAL : std::log(v);
  }
  return from_log_scores(std::move(logs));
}

SimilarityMatrix SimilarityMatrix::from_log_scores(Tensor log_scores, SimilarityStage stage) {
  if (log_scores.rank() != 2 || log_scores.dim(0) != log_scores.dim(1)) {
    throw ShapeError("SimilarityMatrix: log-scores must be square, got " +
                     shape_to_string(log_scores.shape()));
  }
  SimilarityMatrix m;
  m.log_scores_ = std::move(log_scores);
  m.stage_ = stage;
  return m;
}

Tensor SimilarityMatrix::probabilities() const {
  Tensor out = log_scores_;
  for (auto& v : out.values()) v = std::exp(v);
  return out;
}

namespace {

// {n} -> {n,1} through broadcast + transpose (reshape is not a primitive).
Var as_column(Record& rec, Var v, int n) { return rec.transpose(rec.broadcast(v, Shape{1, n})); }

void check_has_mass(const Tensor& logs) {
  const int n = logs.dim(0);
  for (int i = 0; i < n; ++i) {
    bool row = false, col = false;
    for (int j = 0; j < n; ++j) {
      row = row || logs.at(i, j) > -HUGE_VAL;
      col = col || logs.at(j, i) > -HUGE_VAL;
      if (std::isnan(logs.at(i, j))) throw NumericError("sinkhorn: NaN log-score");
    }
    if (!row || !col) {
      throw NumericError("sinkhorn: non-positive input (row or column " + std::to_string(i) +
                         " has no mass)");
    }
  }
}

double max_sum_deviation(const Tensor& logs) {
  const int n = logs.dim(0);
  std::vector<double> buf(static_cast<std::size_t>(n)), scratch;
  double dev = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) buf[static_cast<std::size_t>(j)] = logs.at(i, j);
    dev = std::max(dev, std::abs(std::exp(numeric::log_sum_exp(buf, scratch)) - 1.0));
  }
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) buf[static_cast<std::size_t>(i)] = logs.at(i, j);
    dev = std::max(dev, std::abs(std::exp(numeric::log_sum_exp(buf, scratch)) - 1.0));
  }
  return dev;
}

}  // namespace

Var sinkhorn_log_op(Record& rec, Var log_scores, const SinkhornConfig& cfg, SinkhornStats* stats) {
  const Tensor& initial = rec.value(log_scores);
  if (initial.rank() != 2 || initial.dim(0) != initial.dim(1)) {
    throw ShapeError("sinkhorn: log-scores must be square, got " + shape_to_string(initial.shape()));
  }
  if (cfg.max_iters < 1) throw ConfigError("sinkhorn: max_iters must be at least 1");
  const int n = initial.dim(0);
  check_has_mass(initial);

  const Shape full{n, n};
  Var cur = log_scores;
  SinkhornStats local;
  for (int round = 1; round <= cfg.max_iters; ++round) {
    // Row normalization: subtract each row's log-sum-exp. The row max is
    // injected as a constant; the gradient of LSE is unchanged by the
    // choice of stabilizer.
    {
      const Tensor& values = rec.value(cur);
      Tensor row_max(Shape{n, 1});
      for (int i = 0; i < n; ++i) {
        double m = -HUGE_VAL;
        for (int j = 0; j < n; ++j) m = std::max(m, values.at(i, j));
        row_max.at(i, 0) = m;
      }
      Var m = rec.input(std::move(row_max));
      Var e = rec.exp(rec.sub(cur, rec.broadcast(m, full)));
      Var s = rec.sum_axis(e, 1, /*canonical=*/true);  // every row sum >= 1
      Var lse = rec.add(as_column(rec, rec.log(s), n), m);
      cur = rec.sub(cur, rec.broadcast(lse, full));
    }
    // Column normalization, symmetric.
    {
      const Tensor& values = rec.value(cur);
      Tensor col_max(Shape{1, n});
      for (int j = 0; j < n; ++j) {
        double m = -HUGE_VAL;
        for (int i = 0; i < n; ++i) m = std::max(m, values.at(i, j));
        col_max.at(0, j) = m;
      }
      Var m = rec.input(std::move(col_max));
      Var e = rec.exp(rec.sub(cur, rec.broadcast(m, full)));
      Var s = rec.sum_axis(e, 0, /*canonical=*/true);
      Var lse = rec.add(rec.broadcast(rec.log(s), Shape{1, n}), m);
      cur = rec.sub(cur, rec.broadcast(lse, full));
    }
    local.iterations = round;
    local.deviation = max_sum_deviation(rec.value(cur));
    if (local.deviation < cfg.tol) {
      local.converged = true;
      break;
    }
  }
  if (stats != nullptr) *stats = local;
  return cur;
}

SinkhornResult sinkhorn(const SimilarityMatrix& m, const SinkhornConfig& cfg) {
  Record rec;
  Var in = rec.input(m.log_scores());
  SinkhornResult result;
  Var out = sinkhorn_log_op(rec, in, cfg, &result.stats);
  result.matrix = SimilarityMatrix::from_log_scores(rec.value(out), SimilarityStage::kDoublyStochastic);
  return result;
}

}  // namespace gmatch
