#include "gmatch/autodiff.hpp"

#include <cmath>
#include <span>

#include "gmatch/error.hpp"
#include "gmatch/numeric.hpp"

namespace gmatch {

const char* op_name(Op op) {
  switch (op) {
    case Op::kLeaf: return "leaf";
    case Op::kMatmul: return "matmul";
    case Op::kAdd: return "add";
    case Op::kSub: return "sub";
    case Op::kMul: return "elementwise-mul";
    case Op::kDiv: return "elementwise-div";
    case Op::kExp: return "exp";
    case Op::kLog: return "log";
    case Op::kRelu: return "relu";
    case Op::kSumAxis: return "sum-over-axis";
    case Op::kBroadcast: return "broadcast";
    case Op::kConcat: return "concat-last-axis";
    case Op::kTranspose: return "transpose";
    case Op::kScalarMul: return "scalar-mul";
  }
  return "?";
}

namespace {

[[noreturn]] void shape_fail(Op op, const Tensor& a, const Tensor& b) {
  throw ShapeError(std::string(op_name(op)) + ": incompatible shapes " + shape_to_string(a.shape()) +
                   " and " + shape_to_string(b.shape()));
}

[[noreturn]] void shape_fail(Op op, const Tensor& a, const std::string& detail) {
  throw ShapeError(std::string(op_name(op)) + ": shape " + shape_to_string(a.shape()) + " " + detail);
}

void require_same_shape(Op op, const Tensor& a, const Tensor& b) {
  if (!a.same_shape(b)) shape_fail(op, a, b);
}

bool broadcast_compatible(const Shape& src, const Shape& dst) {
  if (src.empty()) return true;  // scalar to anything
  if (src.size() == 1 && dst.size() == 2 && src[0] == dst[1]) return true;          // row vector
  if (src.size() == 2 && dst.size() == 2 && src[0] == dst[0] && src[1] == 1) return true;  // column
  if (src.size() == 2 && dst.size() == 2 && src[0] == 1 && src[1] == dst[1]) return true;  // row
  return src == dst;
}

}  // namespace

Var Record::check_owned(Var v, const char* op) const {
  if (!v.valid() || v.owner != this || v.slot >= static_cast<int>(nodes_.size())) {
    throw NumericError(std::string(op) + ": operand does not belong to this record");
  }
  return v;
}

Var Record::push(Node node, Tensor value) {
  bool grad = false;
  for (int i = 0; i < node.n_in; ++i) grad = grad || needs_grad_[node.in[i]];
  if (node.op == Op::kLeaf) grad = value.requires_grad();
  nodes_.push_back(std::move(node));
  vals_.push_back(std::move(value));
  needs_grad_.push_back(grad);
  param_of_.push_back(nullptr);
  return Var{static_cast<int>(nodes_.size()) - 1, this};
}

Var Record::input(Tensor t) {
  t.set_requires_grad(false);
  return push(Node{}, std::move(t));
}

Var Record::param(const Parameter& p) {
  auto it = param_slot_.find(&p);
  if (it != param_slot_.end()) return Var{it->second, this};
  Tensor t = p.value;
  t.set_requires_grad(true);
  Var v = push(Node{}, std::move(t));
  param_of_[v.slot] = &p;
  param_slot_[&p] = v.slot;
  return v;
}

Tensor Record::compute(const Node& node, const std::vector<Tensor>& vals) const {
  const Tensor* pa = node.n_in > 0 ? &vals[node.in[0]] : nullptr;
  const Tensor* pb = node.n_in > 1 ? &vals[node.in[1]] : nullptr;
  switch (node.op) {
    case Op::kLeaf:
      throw NumericError("compute: leaf has no operation");
    case Op::kMatmul: {
      const Tensor& a = *pa;
      const Tensor& b = *pb;
      Tensor c(Shape{a.dim(0), b.dim(1)});
      if (node.canonical) {
        numeric::matmul_canonical(a.data(), b.data(), c.data(), a.dim(0), a.dim(1), b.dim(1));
      } else {
        numeric::matmul_acc(a.data(), b.data(), c.data(), a.dim(0), a.dim(1), b.dim(1));
      }
      return c;
    }
    case Op::kAdd: {
      Tensor c = *pa;
      for (std::int64_t i = 0; i < c.numel(); ++i) c.data()[i] += pb->data()[i];
      return c;
    }
    case Op::kSub: {
      Tensor c = *pa;
      for (std::int64_t i = 0; i < c.numel(); ++i) c.data()[i] -= pb->data()[i];
      return c;
    }
    case Op::kMul: {
      Tensor c = *pa;
      for (std::int64_t i = 0; i < c.numel(); ++i) c.data()[i] *= pb->data()[i];
      return c;
    }
    case Op::kDiv: {
      Tensor c = *pa;
      for (std::int64_t i = 0; i < c.numel(); ++i) c.data()[i] /= pb->data()[i];
      if (!c.all_finite()) throw NumericError("elementwise-div: non-finite result (division by zero?)");
      return c;
    }
    case Op::kExp: {
      Tensor c = *pa;
      double max_arg = -HUGE_VAL;
      for (std::int64_t i = 0; i < c.numel(); ++i) {
        max_arg = std::max(max_arg, c.data()[i]);
        c.data()[i] = std::exp(c.data()[i]);
      }
      if (!c.all_finite()) {
        throw NumericError("exp: overflow, max exponent " + std::to_string(max_arg));
      }
      return c;
    }
    case Op::kLog: {
      Tensor c = *pa;
      for (std::int64_t i = 0; i < c.numel(); ++i) {
        if (c.data()[i] <= 0.0) {
          throw NumericError("log: non-positive value " + std::to_string(c.data()[i]) +
                             " (callers must clamp first)");
        }
        c.data()[i] = std::log(c.data()[i]);
      }
      return c;
    }
    case Op::kRelu: {
      Tensor c = *pa;
      for (std::int64_t i = 0; i < c.numel(); ++i) c.data()[i] = c.data()[i] > 0.0 ? c.data()[i] : 0.0;
      return c;
    }
    case Op::kSumAxis: {
      const Tensor& a = *pa;
      if (a.rank() == 1) {
        Tensor c(Shape{});
        std::vector<double> buf(a.values());
        c.data()[0] = node.canonical ? numeric::canonical_sum(buf)
                                     : numeric::sum(std::span<const double>(a.values()));
        return c;
      }
      const int n = a.dim(0), m = a.dim(1);
      if (node.axis == 0) {
        Tensor c(Shape{m});
        std::vector<double> buf(static_cast<std::size_t>(n));
        for (int j = 0; j < m; ++j) {
          for (int i = 0; i < n; ++i) buf[static_cast<std::size_t>(i)] = a.at(i, j);
          c.at(j) = node.canonical ? numeric::canonical_sum(buf) : numeric::sum(buf);
        }
        return c;
      }
      Tensor c(Shape{n});
      std::vector<double> buf(static_cast<std::size_t>(m));
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j) buf[static_cast<std::size_t>(j)] = a.at(i, j);
        c.at(i) = node.canonical ? numeric::canonical_sum(buf) : numeric::sum(buf);
      }
      return c;
    }
    case Op::kBroadcast: {
      const Tensor& a = *pa;
      Tensor c(node.target);
      if (a.shape() == node.target) return a;
      if (a.rank() == 0) {
        for (std::int64_t i = 0; i < c.numel(); ++i) c.data()[i] = a.data()[0];
      } else if (a.rank() == 1) {
        const int n = node.target[0], m = node.target[1];
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < m; ++j) c.at(i, j) = a.at(j);
      } else if (a.dim(1) == 1) {
        const int n = node.target[0], m = node.target[1];
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < m; ++j) c.at(i, j) = a.at(i, 0);
      } else {
        const int n = node.target[0], m = node.target[1];
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < m; ++j) c.at(i, j) = a.at(0, j);
      }
      return c;
    }
    case Op::kConcat: {
      const Tensor& a = *pa;
      const Tensor& b = *pb;
      if (a.rank() == 1) {
        Tensor c(Shape{a.dim(0) + b.dim(0)});
        for (int i = 0; i < a.dim(0); ++i) c.at(i) = a.at(i);
        for (int i = 0; i < b.dim(0); ++i) c.at(a.dim(0) + i) = b.at(i);
        return c;
      }
      const int n = a.dim(0), da = a.dim(1), db = b.dim(1);
      Tensor c(Shape{n, da + db});
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < da; ++j) c.at(i, j) = a.at(i, j);
        for (int j = 0; j < db; ++j) c.at(i, da + j) = b.at(i, j);
      }
      return c;
    }
    case Op::kTranspose:
      return pa->transposed();
    case Op::kScalarMul: {
      Tensor c = *pa;
      for (std::int64_t i = 0; i < c.numel(); ++i) c.data()[i] *= node.scalar;
      return c;
    }
  }
  throw NumericError("compute: unknown op");
}

Var Record::matmul(Var a, Var b, bool canonical) {
  check_owned(a, "matmul");
  check_owned(b, "matmul");
  const Tensor& ta = vals_[a.slot];
  const Tensor& tb = vals_[b.slot];
  if (ta.rank() != 2 || tb.rank() != 2 || ta.dim(1) != tb.dim(0)) shape_fail(Op::kMatmul, ta, tb);
  Node n{.op = Op::kMatmul, .in = {a.slot, b.slot}, .n_in = 2};
  n.canonical = canonical;
  Tensor v = compute(n, vals_);
  return push(std::move(n), std::move(v));
}

#define GMATCH_BINARY_ELEMENTWISE(fn, opv)                         \
  Var Record::fn(Var a, Var b) {                                   \
    check_owned(a, op_name(opv));                                  \
    check_owned(b, op_name(opv));                                  \
    require_same_shape(opv, vals_[a.slot], vals_[b.slot]);         \
    Node n{.op = opv, .in = {a.slot, b.slot}, .n_in = 2};          \
    Tensor v = compute(n, vals_);                                  \
    return push(std::move(n), std::move(v));                       \
  }

GMATCH_BINARY_ELEMENTWISE(add, Op::kAdd)
GMATCH_BINARY_ELEMENTWISE(sub, Op::kSub)
GMATCH_BINARY_ELEMENTWISE(mul, Op::kMul)
GMATCH_BINARY_ELEMENTWISE(div, Op::kDiv)
#undef GMATCH_BINARY_ELEMENTWISE

#define GMATCH_UNARY_ELEMENTWISE(fn, opv)   \
  Var Record::fn(Var a) {                   \
    check_owned(a, op_name(opv));           \
    Node n{.op = opv, .in = {a.slot, -1}, .n_in = 1};  \
    Tensor v = compute(n, vals_);           \
    return push(std::move(n), std::move(v)); \
  }

GMATCH_UNARY_ELEMENTWISE(exp, Op::kExp)
GMATCH_UNARY_ELEMENTWISE(log, Op::kLog)
GMATCH_UNARY_ELEMENTWISE(relu, Op::kRelu)
#undef GMATCH_UNARY_ELEMENTWISE

Var Record::sum_axis(Var a, int axis, bool canonical) {
  check_owned(a, "sum-over-axis");
  const Tensor& ta = vals_[a.slot];
  if (ta.rank() == 0 || ta.rank() > 2 || axis < 0 || axis >= ta.rank()) {
    shape_fail(Op::kSumAxis, ta, "has no axis " + std::to_string(axis));
  }
  Node n{.op = Op::kSumAxis, .in = {a.slot, -1}, .n_in = 1};
  n.axis = axis;
  n.canonical = canonical;
  Tensor v = compute(n, vals_);
  return push(std::move(n), std::move(v));
}

Var Record::broadcast(Var a, Shape target) {
  check_owned(a, "broadcast");
  const Tensor& ta = vals_[a.slot];
  if (!broadcast_compatible(ta.shape(), target)) {
    shape_fail(Op::kBroadcast, ta, "does not broadcast to " + shape_to_string(target));
  }
  Node n{.op = Op::kBroadcast, .in = {a.slot, -1}, .n_in = 1};
  n.target = std::move(target);
  Tensor v = compute(n, vals_);
  return push(std::move(n), std::move(v));
}

Var Record::concat(Var a, Var b) {
  check_owned(a, "concat-last-axis");
  check_owned(b, "concat-last-axis");
  const Tensor& ta = vals_[a.slot];
  const Tensor& tb = vals_[b.slot];
  const bool ok = (ta.rank() == 1 && tb.rank() == 1) ||
                  (ta.rank() == 2 && tb.rank() == 2 && ta.dim(0) == tb.dim(0));
  if (!ok) shape_fail(Op::kConcat, ta, tb);
  Node n{.op = Op::kConcat, .in = {a.slot, b.slot}, .n_in = 2};
  Tensor v = compute(n, vals_);
  return push(std::move(n), std::move(v));
}

Var Record::transpose(Var a) {
  check_owned(a, "transpose");
  if (vals_[a.slot].rank() != 2) shape_fail(Op::kTranspose, vals_[a.slot], "is not rank 2");
  Node n{.op = Op::kTranspose, .in = {a.slot, -1}, .n_in = 1};
  Tensor v = compute(n, vals_);
  return push(std::move(n), std::move(v));
}

Var Record::scalar_mul(Var a, double s) {
  check_owned(a, "scalar-mul");
  Node n{.op = Op::kScalarMul, .in = {a.slot, -1}, .n_in = 1};
  n.scalar = s;
  Tensor v = compute(n, vals_);
  return push(std::move(n), std::move(v));
}

const Tensor& Record::value(Var v) const {
  check_owned(v, "value");
  return vals_[v.slot];
}

std::vector<std::optional<Tensor>> Record::grad_sweep(Var out) const {
  check_owned(out, "backward");
  if (vals_[out.slot].numel() != 1) {
    throw NumericError("backward: output of shape " + shape_to_string(vals_[out.slot].shape()) +
                       " is not a scalar");
  }
  // Structural check: inputs must precede their node (no cycles).
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    for (int k = 0; k < nodes_[i].n_in; ++k) {
      if (nodes_[i].in[k] < 0 || nodes_[i].in[k] >= static_cast<int>(i)) {
        throw NumericError("backward: record is not topologically ordered at node " + std::to_string(i));
      }
    }
  }

  std::vector<std::optional<Tensor>> grads(nodes_.size());
  grads[out.slot] = Tensor::full(vals_[out.slot].shape(), 1.0);

  auto grad_of = [&](int slot) -> Tensor& {
    if (!grads[slot]) grads[slot] = Tensor(vals_[slot].shape());
    return *grads[slot];
  };

  for (int i = static_cast<int>(nodes_.size()) - 1; i >= 0; --i) {
    if (!grads[i] || !needs_grad_[i]) continue;
    const Node& node = nodes_[i];
    const Tensor& g = *grads[i];
    const Tensor& y = vals_[i];
    switch (node.op) {
      case Op::kLeaf:
        break;
      case Op::kMatmul: {
        const Tensor& a = vals_[node.in[0]];
        const Tensor& b = vals_[node.in[1]];
        if (needs_grad_[node.in[0]]) {
          numeric::matmul_grad_a_acc(g.data(), b.data(), grad_of(node.in[0]).data(), a.dim(0), a.dim(1),
                                     b.dim(1));
        }
        if (needs_grad_[node.in[1]]) {
          numeric::matmul_grad_b_acc(a.data(), g.data(), grad_of(node.in[1]).data(), a.dim(0), a.dim(1),
                                     b.dim(1));
        }
        break;
      }
      case Op::kAdd:
        for (int k = 0; k < 2; ++k) {
          if (!needs_grad_[node.in[k]]) continue;
          Tensor& gi = grad_of(node.in[k]);
          for (std::int64_t t = 0; t < gi.numel(); ++t) gi.data()[t] += g.data()[t];
        }
        break;
      case Op::kSub: {
        if (needs_grad_[node.in[0]]) {
          Tensor& ga = grad_of(node.in[0]);
          for (std::int64_t t = 0; t < ga.numel(); ++t) ga.data()[t] += g.data()[t];
        }
        if (needs_grad_[node.in[1]]) {
          Tensor& gb = grad_of(node.in[1]);
          for (std::int64_t t = 0; t < gb.numel(); ++t) gb.data()[t] -= g.data()[t];
        }
        break;
      }
      case Op::kMul: {
        const Tensor& a = vals_[node.in[0]];
        const Tensor& b = vals_[node.in[1]];
        if (needs_grad_[node.in[0]]) {
          Tensor& ga = grad_of(node.in[0]);
          for (std::int64_t t = 0; t < ga.numel(); ++t) ga.data()[t] += g.data()[t] * b.data()[t];
        }
        if (needs_grad_[node.in[1]]) {
          Tensor& gb = grad_of(node.in[1]);
          for (std::int64_t t = 0; t < gb.numel(); ++t) gb.data()[t] += g.data()[t] * a.data()[t];
        }
        break;
      }
      case Op::kDiv: {
        const Tensor& b = vals_[node.in[1]];
        if (needs_grad_[node.in[0]]) {
          Tensor& ga = grad_of(node.in[0]);
          for (std::int64_t t = 0; t < ga.numel(); ++t) ga.data()[t] += g.data()[t] / b.data()[t];
        }
        if (needs_grad_[node.in[1]]) {
          Tensor& gb = grad_of(node.in[1]);
          for (std::int64_t t = 0; t < gb.numel(); ++t)
            gb.data()[t] -= g.data()[t] * y.data()[t] / b.data()[t];
        }
        break;
      }
      case Op::kExp: {
        if (needs_grad_[node.in[0]]) {
          Tensor& ga = grad_of(node.in[0]);
          for (std::int64_t t = 0; t < ga.numel(); ++t) ga.data()[t] += g.data()[t] * y.data()[t];
        }
        break;
      }
      case Op::kLog: {
        const Tensor& a = vals_[node.in[0]];
        if (needs_grad_[node.in[0]]) {
          Tensor& ga = grad_of(node.in[0]);
          for (std::int64_t t = 0; t < ga.numel(); ++t) ga.data()[t] += g.data()[t] / a.data()[t];
        }
        break;
      }
      case Op::kRelu: {
        const Tensor& a = vals_[node.in[0]];
        if (needs_grad_[node.in[0]]) {
          Tensor& ga = grad_of(node.in[0]);
          for (std::int64_t t = 0; t < ga.numel(); ++t)
            if (a.data()[t] > 0.0) ga.data()[t] += g.data()[t];
        }
        break;
      }
      case Op::kSumAxis: {
        const Tensor& a = vals_[node.in[0]];
        if (!needs_grad_[node.in[0]]) break;
        Tensor& ga = grad_of(node.in[0]);
        if (a.rank() == 1) {
          for (int t = 0; t < a.dim(0); ++t) ga.at(t) += g.data()[0];
        } else if (node.axis == 0) {
          for (int r = 0; r < a.dim(0); ++r)
            for (int c = 0; c < a.dim(1); ++c) ga.at(r, c) += g.at(c);
        } else {
          for (int r = 0; r < a.dim(0); ++r)
            for (int c = 0; c < a.dim(1); ++c) ga.at(r, c) += g.at(r);
        }
        break;
      }
      case Op::kBroadcast: {
        const Tensor& a = vals_[node.in[0]];
        if (!needs_grad_[node.in[0]]) break;
        Tensor& ga = grad_of(node.in[0]);
        if (a.shape() == node.target) {
          for (std::int64_t t = 0; t < ga.numel(); ++t) ga.data()[t] += g.data()[t];
        } else if (a.rank() == 0) {
          double acc = 0.0;
          for (std::int64_t t = 0; t < g.numel(); ++t) acc += g.data()[t];
          ga.data()[0] += acc;
        } else if (a.rank() == 1) {
          for (int r = 0; r < node.target[0]; ++r)
            for (int c = 0; c < node.target[1]; ++c) ga.at(c) += g.at(r, c);
        } else if (a.dim(1) == 1) {
          for (int r = 0; r < node.target[0]; ++r)
            for (int c = 0; c < node.target[1]; ++c) ga.at(r, 0) += g.at(r, c);
        } else {
          for (int r = 0; r < node.target[0]; ++r)
            for (int c = 0; c < node.target[1]; ++c) ga.at(0, c) += g.at(r, c);
        }
        break;
      }
      case Op::kConcat: {
        const Tensor& a = vals_[node.in[0]];
        const Tensor& b = vals_[node.in[1]];
        if (a.rank() == 1) {
          if (needs_grad_[node.in[0]]) {
            Tensor& ga = grad_of(node.in[0]);
            for (int t = 0; t < a.dim(0); ++t) ga.at(t) += g.at(t);
          }
          if (needs_grad_[node.in[1]]) {
            Tensor& gb = grad_of(node.in[1]);
            for (int t = 0; t < b.dim(0); ++t) gb.at(t) += g.at(a.dim(0) + t);
          }
        } else {
          if (needs_grad_[node.in[0]]) {
            Tensor& ga = grad_of(node.in[0]);
            for (int r = 0; r < a.dim(0); ++r)
              for (int c = 0; c < a.dim(1); ++c) ga.at(r, c) += g.at(r, c);
          }
          if (needs_grad_[node.in[1]]) {
            Tensor& gb = grad_of(node.in[1]);
            for (int r = 0; r < b.dim(0); ++r)
              for (int c = 0; c < b.dim(1); ++c) gb.at(r, c) += g.at(r, a.dim(1) + c);
          }
        }
        break;
      }
      case Op::kTranspose: {
        if (needs_grad_[node.in[0]]) {
          Tensor& ga = grad_of(node.in[0]);
          for (int r = 0; r < y.dim(0); ++r)
            for (int c = 0; c < y.dim(1); ++c) ga.at(c, r) += g.at(r, c);
        }
        break;
      }
      case Op::kScalarMul: {
        if (needs_grad_[node.in[0]]) {
          Tensor& ga = grad_of(node.in[0]);
          for (std::int64_t t = 0; t < ga.numel(); ++t) ga.data()[t] += node.scalar * g.data()[t];
        }
        break;
      }
    }
  }
  return grads;
}

GradMap Record::backward(Var out) const {
  auto grads = grad_sweep(out);
  GradMap result;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (param_of_[i] == nullptr) continue;
    if (grads[i]) {
      result.emplace(param_of_[i], std::move(*grads[i]));
    } else {
      result.emplace(param_of_[i], Tensor(vals_[i].shape()));
    }
  }
  return result;
}

void Record::backward_accumulate(Var out) const {
  auto grads = grad_sweep(out);
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Parameter* p = param_of_[i];
    if (p == nullptr || !grads[i]) continue;
    Tensor& acc = const_cast<Parameter*>(p)->grad;
    for (std::int64_t t = 0; t < acc.numel(); ++t) acc.data()[t] += grads[i]->data()[t];
  }
}

std::vector<Tensor> Record::replay() const {
  std::vector<Tensor> vals;
  vals.reserve(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].op == Op::kLeaf) {
      vals.push_back(vals_[i]);
    } else {
      vals.push_back(compute(nodes_[i], vals));
    }
  }
  return vals;
}

Var clamped_log(Record& rec, Var x, double eps) {
  const Shape shape = rec.value(x).shape();
  Var e = rec.input(Tensor::full(shape, eps));
  Var shifted = rec.relu(rec.sub(x, e));
  return rec.log(rec.add(shifted, e));
}

Var sqrt_positive(Record& rec, Var x) {
  return rec.exp(rec.scalar_mul(clamped_log(rec, x), 0.5));
}

}  // namespace gmatch
