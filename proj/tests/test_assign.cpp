#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gmatch/error.hpp"
#include "gmatch/gradcheck.hpp"
#include "gmatch/hungarian.hpp"
#include "gmatch/rng.hpp"
#include "gmatch/sinkhorn.hpp"

using namespace gmatch;

namespace {

Tensor random_positive(int n, Rng& rng, double lo = 0.05, double hi = 4.0) {
  Tensor t(Shape{n, n});
  for (auto& v : t.values()) v = rng.uniform(lo, hi);
  return t;
}

double row_col_deviation(const Tensor& s) {
  const int n = s.dim(0);
  double dev = 0.0;
  for (int i = 0; i < n; ++i) {
    double rs = 0.0, cs = 0.0;
    for (int j = 0; j < n; ++j) {
      rs += s.at(i, j);
      cs += s.at(j, i);
    }
    dev = std::max({dev, std::abs(rs - 1.0), std::abs(cs - 1.0)});
  }
  return dev;
}

PermutationMatrix brute_force_assignment(const Tensor& scores, double* best_out) {
  const int n = scores.dim(0);
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> best = perm;
  double best_val = -1e300;
  do {
    double val = 0.0;
    for (int i = 0; i < n; ++i) val += scores.at(i, perm[i]);
    if (val > best_val) {
      best_val = val;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  if (best_out != nullptr) *best_out = best_val;
  return PermutationMatrix::from_indices(best);
}

}  // namespace

TEST_CASE("uniform matrix normalizes to 1/N in one round") {
  for (int n : {2, 5, 9}) {
    SinkhornResult r = sinkhorn(SimilarityMatrix::from_scores(Tensor::ones(Shape{n, n})), {10, 1e-9});
    CHECK(r.stats.converged);
    CHECK(r.stats.iterations == 1);
    Tensor s = r.matrix.probabilities();
    for (std::int64_t i = 0; i < s.numel(); ++i) {
      CHECK(s.data()[i] == doctest::Approx(1.0 / n).epsilon(1e-14));
    }
  }
}

TEST_CASE("known 2x2 fixed point") {
  Tensor m(Shape{2, 2}, {2, 1, 1, 2});
  SinkhornResult r = sinkhorn(SimilarityMatrix::from_scores(m), {500, 1e-13});
  Tensor s = r.matrix.probabilities();
  CHECK(std::abs(s.at(0, 0) - 2.0 / 3.0) < 1e-9);
  CHECK(std::abs(s.at(0, 1) - 1.0 / 3.0) < 1e-9);
  CHECK(std::abs(s.at(1, 0) - 1.0 / 3.0) < 1e-9);
  CHECK(std::abs(s.at(1, 1) - 2.0 / 3.0) < 1e-9);
  CHECK(row_col_deviation(s) < 1e-9);
}

TEST_CASE("diagonal scaling does not change the fixed point") {
  Rng rng(17);
  for (int trial = 0; trial < 6; ++trial) {
    const int n = 6;
    Tensor m = random_positive(n, rng);
    Tensor scaled = m;
    std::vector<double> d1(n), d2(n);
    for (int i = 0; i < n; ++i) {
      d1[i] = rng.uniform(0.1, 10.0);
      d2[i] = rng.uniform(0.1, 10.0);
    }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) scaled.at(i, j) = d1[i] * m.at(i, j) * d2[j];

    const SinkhornConfig cfg{1000, 1e-12};
    Tensor a = sinkhorn(SimilarityMatrix::from_scores(m), cfg).matrix.probabilities();
    Tensor b = sinkhorn(SimilarityMatrix::from_scores(scaled), cfg).matrix.probabilities();
    for (std::int64_t i = 0; i < a.numel(); ++i) CHECK(std::abs(a.data()[i] - b.data()[i]) < 1e-8);
  }
}

TEST_CASE("converged outputs are doubly stochastic across sizes") {
  Rng rng(23);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform_index(49));
    SinkhornResult r = sinkhorn(SimilarityMatrix::from_scores(random_positive(n, rng)), {200, 1e-6});
    CHECK(r.stats.converged);
    CHECK(row_col_deviation(r.matrix.probabilities()) < 1e-6);
    CHECK(r.matrix.stage() == SimilarityStage::kDoublyStochastic);
  }
}

TEST_CASE("hitting max_iters reports the achieved deviation") {
  Rng rng(31);
  SinkhornResult r = sinkhorn(SimilarityMatrix::from_scores(random_positive(12, rng)), {1, 1e-14});
  CHECK_FALSE(r.stats.converged);
  CHECK(r.stats.iterations == 1);
  CHECK(r.stats.deviation > 0.0);
  CHECK(r.stats.deviation == doctest::Approx(row_col_deviation(r.matrix.probabilities())).epsilon(1e-12));
}

TEST_CASE("zero rows or columns are rejected") {
  Tensor m(Shape{3, 3}, {1, 2, 3, 0, 0, 0, 4, 5, 6});
  CHECK_THROWS_WITH_AS(sinkhorn(SimilarityMatrix::from_scores(m), {10, 1e-6}),
                       doctest::Contains("non-positive input"), NumericError);
  Tensor neg(Shape{2, 2}, {1, -1, 1, 1});
  CHECK_THROWS_AS(SimilarityMatrix::from_scores(neg), NumericError);
}

TEST_CASE("individual zero entries act as exclusions") {
  Tensor m(Shape{2, 2}, {0, 1, 1, 0});
  Tensor s = sinkhorn(SimilarityMatrix::from_scores(m), {50, 1e-9}).matrix.probabilities();
  CHECK(s.at(0, 0) == 0.0);
  CHECK(s.at(0, 1) == doctest::Approx(1.0));
}

TEST_CASE("sinkhorn gradients pass finite differences through unrolled iterations") {
  Rng rng(7);
  const int n = 4;
  Parameter logits("logits", random_positive(n, rng, -1.0, 1.0));
  Tensor weight = random_positive(n, rng, -1.0, 1.0);
  // tol = 0 forces exactly max_iters rounds, keeping the unroll depth
  // locally constant for the finite-difference probe.
  const SinkhornConfig cfg{5, 0.0};
  auto f = [&](Record& rec) {
    Var s = sinkhorn_log_op(rec, rec.param(logits), cfg);
    Var weighted = rec.mul(rec.exp(s), rec.input(weight));
    return rec.sum_axis(rec.sum_axis(weighted, 1), 0);
  };
  auto report = finite_diff_check(f, {&logits}, 1e-5, 1e-4);
  INFO("max rel err ", report.max_rel_error);
  CHECK(report.pass);
}

TEST_CASE("plain and recorded sinkhorn agree bitwise") {
  Rng rng(57);
  const int n = 8;
  Tensor m = random_positive(n, rng);
  SimilarityMatrix sim = SimilarityMatrix::from_scores(m);
  const SinkhornConfig cfg{30, 1e-8};
  SinkhornResult plain = sinkhorn(sim, cfg);

  Record rec;
  SinkhornStats stats;
  Var out = sinkhorn_log_op(rec, rec.input(sim.log_scores()), cfg, &stats);
  CHECK(stats.iterations == plain.stats.iterations);
  const Tensor& a = rec.value(out);
  const Tensor& b = plain.matrix.log_scores();
  for (std::int64_t i = 0; i < a.numel(); ++i) CHECK(a.data()[i] == b.data()[i]);
}

TEST_CASE("hungarian picks the dominant diagonal") {
  Tensor s(Shape{3, 3}, {1, 0, 0, 0, 1, 0, 0, 0, 1});
  CHECK(hungarian(s) == PermutationMatrix::identity(3));
  Tensor r(Shape{3, 3}, {0, 0, 5, 0, 5, 0, 5, 0, 0});
  PermutationMatrix rev = hungarian(r);
  for (int i = 0; i < 3; ++i) CHECK(rev(i) == 2 - i);
}

TEST_CASE("hungarian equals brute force on 100 random 7x7 instances") {
  Rng rng(101);
  for (int trial = 0; trial < 100; ++trial) {
    Tensor s(Shape{7, 7});
    for (auto& v : s.values()) v = rng.uniform(-3.0, 3.0);
    PermutationMatrix fast = hungarian(s);
    double best = 0.0;
    brute_force_assignment(s, &best);
    CHECK(assignment_objective(s, fast) == best);
  }
}

TEST_CASE("hungarian is invariant to constant shifts") {
  Rng rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    Tensor s(Shape{6, 6});
    for (auto& v : s.values()) v = rng.uniform(-2.0, 2.0);
    Tensor shifted = s;
    const double c = rng.uniform(-5.0, 5.0);
    for (auto& v : shifted.values()) v += c;
    CHECK(hungarian(s) == hungarian(shifted));
  }
}

TEST_CASE("hungarian validates its input") {
  Tensor bad(Shape{2, 3});
  CHECK_THROWS_AS(hungarian(bad), ShapeError);
  Tensor inf(Shape{2, 2}, {1.0, HUGE_VAL, 0.0, 1.0});
  CHECK_THROWS_AS(hungarian(inf), NumericError);
}
