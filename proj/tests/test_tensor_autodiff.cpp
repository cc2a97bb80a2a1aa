#include <doctest.h>

#include <cmath>

#include "gmatch/autodiff.hpp"
#include "gmatch/error.hpp"
#include "gmatch/gradcheck.hpp"
#include "gmatch/numeric.hpp"
#include "gmatch/rng.hpp"
#include "gmatch/tensor.hpp"

using namespace gmatch;

namespace {

Tensor random_tensor(Shape shape, Rng& rng, double lo = -1.0, double hi = 1.0) {
  Tensor t(std::move(shape));
  for (auto& v : t.values()) v = rng.uniform(lo, hi);
  return t;
}

Parameter random_param(const std::string& name, Shape shape, Rng& rng) {
  return Parameter(name, random_tensor(std::move(shape), rng));
}

}  // namespace

TEST_CASE("tensor basics") {
  Tensor t(Shape{2, 3});
  CHECK(t.numel() == 6);
  t.at(1, 2) = 5.0;
  CHECK(t.at(1, 2) == 5.0);
  CHECK(t.all_finite());
  CHECK(Tensor::scalar(3.0).scalar_value() == 3.0);
  CHECK_THROWS_AS(Tensor(Shape{2}, {1.0, 2.0, 3.0}), ShapeError);

  Parameter p("w", Tensor::ones(Shape{2, 2}));
  CHECK(p.value.requires_grad());
  p.grad.at(0, 0) = 4.0;
  p.reset_grad();
  CHECK(p.grad.at(0, 0) == 0.0);
}

TEST_CASE("matmul with identity returns the operand") {
  Record rec;
  Var id = rec.input(Tensor(Shape{2, 2}, {1, 0, 0, 1}));
  Var x = rec.input(Tensor(Shape{2, 1}, {3, 4}));
  Var y = rec.matmul(id, x);
  CHECK(rec.value(y).at(0, 0) == 3.0);
  CHECK(rec.value(y).at(1, 0) == 4.0);
}

TEST_CASE("exp of zeros is ones") {
  Record rec;
  Var y = rec.exp(rec.input(Tensor(Shape{2, 2})));
  for (int i = 0; i < 4; ++i) CHECK(rec.value(y).data()[i] == 1.0);
}

TEST_CASE("sum-over-axis computes row sums") {
  Record rec;
  Var y = rec.sum_axis(rec.input(Tensor(Shape{2, 2}, {1, 2, 3, 4})), 1);
  CHECK(rec.value(y).at(0) == 3.0);
  CHECK(rec.value(y).at(1) == 7.0);
}

TEST_CASE("backward of sum is all ones") {
  Parameter p("p", Tensor(Shape{3}, {0.3, -0.4, 2.0}));
  Record rec;
  Var out = rec.sum_axis(rec.param(p), 0);
  GradMap g = rec.backward(out);
  const Tensor& gp = g.at(&p);
  for (int i = 0; i < 3; ++i) CHECK(gp.at(i) == 1.0);
}

TEST_CASE("backward of sum(exp(p)) at zero is ones") {
  Parameter p("p", Tensor(Shape{2}, {0.0, 0.0}));
  Record rec;
  Var out = rec.sum_axis(rec.exp(rec.param(p)), 0);
  GradMap g = rec.backward(out);
  CHECK(g.at(&p).at(0) == doctest::Approx(1.0));
  CHECK(g.at(&p).at(1) == doctest::Approx(1.0));
}

TEST_CASE("matmul gradient matches finite differences") {
  Rng rng(7);
  Parameter p = random_param("p", Shape{2, 2}, rng);
  const Tensor x = random_tensor(Shape{2, 2}, rng);
  auto f = [&](Record& rec) {
    Var prod = rec.matmul(rec.param(p), rec.input(x));
    return rec.sum_axis(rec.sum_axis(prod, 1), 0);
  };
  auto report = finite_diff_check(f, {&p}, 1e-5, 1e-6);
  CHECK(report.pass);
  CHECK(report.max_rel_error < 1e-6);
}

TEST_CASE("finite_diff_check on sum of squares") {
  Parameter p("p", Tensor(Shape{3}, {1.0, 2.0, 3.0}));
  auto f = [&](Record& rec) {
    Var v = rec.param(p);
    return rec.sum_axis(rec.mul(v, v), 0);
  };
  auto report = finite_diff_check(f, {&p}, 1e-5, 1e-6);
  CHECK(report.pass);
  CHECK(report.max_rel_error < 1e-6);
  CHECK(report.coords_checked == 3);
}

TEST_CASE("finite_diff_check on a constant function") {
  Parameter p("p", Tensor(Shape{2}, {1.0, -1.0}));
  auto f = [&](Record& rec) {
    rec.param(p);
    return rec.input(Tensor::scalar(5.0));
  };
  auto report = finite_diff_check(f, {&p});
  CHECK(report.pass);
  CHECK(report.max_abs_error == 0.0);
}

TEST_CASE("every primitive passes finite differences on random inputs") {
  Rng rng(11);
  for (int trial = 0; trial < 3; ++trial) {
    Parameter a = random_param("a", Shape{3, 4}, rng);
    Parameter b = random_param("b", Shape{3, 4}, rng);
    Parameter sq = random_param("sq", Shape{4, 3}, rng);
    Parameter pos("pos", random_tensor(Shape{3, 4}, rng, 0.5, 2.0));
    Parameter vec = random_param("vec", Shape{4}, rng);
    Parameter col = random_param("col", Shape{3, 1}, rng);

    auto total = [](Record& rec, Var m) {
      const Tensor& t = rec.value(m);
      Var s = m;
      if (t.rank() == 2) s = rec.sum_axis(s, 1);
      if (rec.value(s).rank() == 1) s = rec.sum_axis(s, 0);
      return s;
    };

    std::vector<std::pair<const char*, ScalarFn>> cases = {
        {"matmul", [&](Record& rec) { return total(rec, rec.matmul(rec.param(a), rec.param(sq))); }},
        {"matmul-canonical",
         [&](Record& rec) { return total(rec, rec.matmul(rec.param(a), rec.param(sq), true)); }},
        {"add", [&](Record& rec) { return total(rec, rec.add(rec.param(a), rec.param(b))); }},
        {"sub", [&](Record& rec) { return total(rec, rec.sub(rec.param(a), rec.param(b))); }},
        {"mul", [&](Record& rec) { return total(rec, rec.mul(rec.param(a), rec.param(b))); }},
        {"div", [&](Record& rec) { return total(rec, rec.div(rec.param(a), rec.param(pos))); }},
        {"exp", [&](Record& rec) { return total(rec, rec.exp(rec.param(a))); }},
        {"log", [&](Record& rec) { return total(rec, rec.log(rec.param(pos))); }},
        {"relu", [&](Record& rec) { return total(rec, rec.relu(rec.param(a))); }},
        {"sum-axis-0", [&](Record& rec) { return total(rec, rec.sum_axis(rec.param(a), 0)); }},
        {"sum-axis-1-canonical",
         [&](Record& rec) { return total(rec, rec.sum_axis(rec.param(a), 1, true)); }},
        {"broadcast-row", [&](Record& rec) { return total(rec, rec.broadcast(rec.param(vec), {3, 4})); }},
        {"broadcast-col", [&](Record& rec) { return total(rec, rec.broadcast(rec.param(col), {3, 4})); }},
        {"concat", [&](Record& rec) { return total(rec, rec.concat(rec.param(a), rec.param(b))); }},
        {"transpose", [&](Record& rec) { return total(rec, rec.transpose(rec.param(a))); }},
        {"scalar-mul", [&](Record& rec) { return total(rec, rec.scalar_mul(rec.param(a), -2.5)); }},
        {"clamped-log", [&](Record& rec) { return total(rec, clamped_log(rec, rec.param(pos))); }},
        {"sqrt", [&](Record& rec) { return total(rec, sqrt_positive(rec, rec.param(pos))); }},
    };
    for (auto& [name, fn] : cases) {
      std::vector<Parameter*> params = {&a, &b, &sq, &pos, &vec, &col};
      auto report = finite_diff_check(fn, params, 1e-5, 1e-4);
      INFO("primitive ", name, " rel err ", report.max_rel_error, " at ", report.worst_coord);
      CHECK(report.pass);
    }
  }
}

TEST_CASE("forward determinism: replay reproduces values bit-identically") {
  Rng rng(3);
  Parameter a = random_param("a", Shape{4, 4}, rng);
  Parameter b = random_param("b", Shape{4, 4}, rng);
  Record rec;
  Var x = rec.matmul(rec.param(a), rec.param(b), true);
  Var y = rec.relu(rec.sub(x, rec.param(b)));
  Var z = rec.sum_axis(rec.sum_axis(rec.exp(rec.scalar_mul(y, 0.25)), 1, true), 0);
  (void)z;
  auto replayed = rec.replay();
  REQUIRE(replayed.size() == rec.size());
  for (std::size_t i = 0; i < replayed.size(); ++i) {
    Var v{static_cast<int>(i), &rec};
    const Tensor& orig = rec.value(v);
    REQUIRE(orig.numel() == replayed[i].numel());
    for (std::int64_t t = 0; t < orig.numel(); ++t) {
      CHECK(orig.data()[t] == replayed[i].data()[t]);
    }
  }
}

TEST_CASE("chain correctness: composed ops match the fused expression") {
  Rng rng(19);
  for (int trial = 0; trial < 5; ++trial) {
    Parameter a = random_param("a", Shape{3, 3}, rng);
    Parameter b = random_param("b", Shape{3, 3}, rng);
    const Tensor x = random_tensor(Shape{3, 3}, rng);

    // (a + b) x  ==  a x + b x
    auto lhs = [&](Record& rec) {
      Var s = rec.matmul(rec.add(rec.param(a), rec.param(b)), rec.input(x));
      return rec.sum_axis(rec.sum_axis(s, 1), 0);
    };
    auto rhs = [&](Record& rec) {
      Var s = rec.add(rec.matmul(rec.param(a), rec.input(x)), rec.matmul(rec.param(b), rec.input(x)));
      return rec.sum_axis(rec.sum_axis(s, 1), 0);
    };
    Record r1, r2;
    GradMap g1 = r1.backward(lhs(r1));
    GradMap g2 = r2.backward(rhs(r2));
    for (Parameter* p : {&a, &b}) {
      for (std::int64_t t = 0; t < p->numel(); ++t) {
        CHECK(g1.at(p).data()[t] == doctest::Approx(g2.at(p).data()[t]).epsilon(1e-12));
      }
    }

    // exp(log(x)) == x for positive x: gradients of sum agree with ones
    Parameter pos("pos", random_tensor(Shape{4}, rng, 0.5, 3.0));
    Record r3;
    Var roundtrip = r3.exp(r3.log(r3.param(pos)));
    GradMap g3 = r3.backward(r3.sum_axis(roundtrip, 0));
    for (int t = 0; t < 4; ++t) CHECK(g3.at(&pos).at(t) == doctest::Approx(1.0).epsilon(1e-12));

    // transpose(transpose(a)) == a
    Record r4;
    GradMap g4 = r4.backward(r4.sum_axis(r4.sum_axis(r4.transpose(r4.transpose(r4.param(a))), 1), 0));
    for (std::int64_t t = 0; t < a.numel(); ++t) CHECK(g4.at(&a).data()[t] == 1.0);
  }
}

TEST_CASE("canonical reductions are invariant to operand permutation") {
  Rng rng(23);
  const int n = 11;
  std::vector<double> vals(n);
  for (auto& v : vals) v = rng.uniform(-1, 1);
  std::vector<double> buf = vals;
  const double s1 = numeric::canonical_sum(buf);
  for (int trial = 0; trial < 10; ++trial) {
    auto perm = rng.permutation(n);
    std::vector<double> shuffled(n);
    for (int i = 0; i < n; ++i) shuffled[i] = vals[perm[i]];
    const double s2 = numeric::canonical_sum(shuffled);
    CHECK(s1 == s2);
  }
}

TEST_CASE("shape mismatch errors name the operation and shapes") {
  Record rec;
  Var a = rec.input(Tensor(Shape{2, 3}));
  Var b = rec.input(Tensor(Shape{2, 3}));
  try {
    rec.matmul(a, b);
    FAIL("expected ShapeError");
  } catch (const ShapeError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("matmul") != std::string::npos);
    CHECK(msg.find("[2,3]") != std::string::npos);
  }
  Var c = rec.input(Tensor(Shape{3, 2}));
  CHECK_THROWS_AS(rec.add(a, c), ShapeError);
  CHECK_THROWS_AS(rec.sum_axis(a, 2), ShapeError);
  CHECK_THROWS_AS(rec.broadcast(a, Shape{5, 5}), ShapeError);
}

TEST_CASE("log of non-positive input throws") {
  Record rec;
  Var a = rec.input(Tensor(Shape{2}, {1.0, 0.0}));
  CHECK_THROWS_AS(rec.log(a), NumericError);
}

TEST_CASE("exp overflow reports the max exponent") {
  Record rec;
  Var a = rec.input(Tensor(Shape{1}, {1000.0}));
  try {
    rec.exp(a);
    FAIL("expected NumericError");
  } catch (const NumericError& e) {
    CHECK(std::string(e.what()).find("1000") != std::string::npos);
  }
}

TEST_CASE("backward requires a scalar output") {
  Parameter p("p", Tensor(Shape{2, 2}, {1, 2, 3, 4}));
  Record rec;
  Var v = rec.param(p);
  CHECK_THROWS_AS(rec.backward(v), NumericError);
}

TEST_CASE("backward ignores non-parameter leaves") {
  Parameter p("p", Tensor(Shape{2}, {1.0, 2.0}));
  Record rec;
  Var x = rec.input(Tensor(Shape{2}, {3.0, 4.0}));
  Var out = rec.sum_axis(rec.mul(rec.param(p), x), 0);
  GradMap g = rec.backward(out);
  CHECK(g.size() == 1);
  CHECK(g.at(&p).at(0) == 3.0);
  CHECK(g.at(&p).at(1) == 4.0);
}

TEST_CASE("registering the same parameter twice shares one slot") {
  Parameter p("p", Tensor(Shape{2}, {1.0, 2.0}));
  Record rec;
  Var v1 = rec.param(p);
  Var v2 = rec.param(p);
  CHECK(v1.slot == v2.slot);
  // p contributes twice: d/dp sum(p + p) = 2.
  GradMap g = rec.backward(rec.sum_axis(rec.add(v1, v2), 0));
  CHECK(g.at(&p).at(0) == 2.0);
}

TEST_CASE("clamped_log clamps below eps and matches log above") {
  Record rec;
  Var x = rec.input(Tensor(Shape{3}, {0.5, 1e-15, 2.0}));
  Var y = clamped_log(rec, x, 1e-12);
  CHECK(rec.value(y).at(0) == doctest::Approx(std::log(0.5)));
  CHECK(rec.value(y).at(1) == doctest::Approx(std::log(1e-12)));
  CHECK(rec.value(y).at(2) == doctest::Approx(std::log(2.0)));
}

TEST_CASE("vars cannot cross records") {
  Record r1, r2;
  Var a = r1.input(Tensor(Shape{1}, {1.0}));
  Var b = r2.input(Tensor(Shape{1}, {1.0}));
  CHECK_THROWS_AS(r1.add(a, b), NumericError);
}
