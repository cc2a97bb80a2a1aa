#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "gmatch/tensor.hpp"

namespace gmatch {

enum class Op {
  kLeaf,
  kMatmul,
  kAdd,
  kSub,
  kMul,       // elementwise-mul
  kDiv,       // elementwise-div
  kExp,
  kLog,
  kRelu,
  kSumAxis,   // sum-over-axis
  kBroadcast,
  kConcat,    // concat-last-axis
  kTranspose,
  kScalarMul,
};

const char* op_name(Op op);

class Record;

// Handle to one value slot of a Record. Cheap to copy; only valid for the
// record that produced it.
struct Var {
  int slot = -1;
  const Record* owner = nullptr;
  bool valid() const { return slot >= 0; }
};

using GradMap = std::unordered_map<const Parameter*, Tensor>;

// Tape of primitive operations for one forward pass. Node i produces value
// slot i; every node's inputs precede it, so a reverse sweep is a valid
// backward pass. A record and its tensors are confined to one thread;
// distinct records may run concurrently.
class Record {
 public:
  Record() = default;
  Record(const Record&) = delete;
  Record& operator=(const Record&) = delete;

  // Leaves. `input` copies a constant; `param` registers a learnable leaf
  // (repeated registration of the same Parameter returns the same slot).
  Var input(Tensor t);
  Var param(const Parameter& p);

  // Primitives.
  Var matmul(Var a, Var b, bool canonical = false);
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);
  Var div(Var a, Var b);
  Var exp(Var a);
  Var log(Var a);
  Var relu(Var a);
  Var sum_axis(Var a, int axis, bool canonical = false);
  Var broadcast(Var a, Shape target);
  Var concat(Var a, Var b);
  Var transpose(Var a);
  Var scalar_mul(Var a, double s);

  const Tensor& value(Var v) const;
  std::size_t size() const { return nodes_.size(); }

  // Reverse-mode sweep from a scalar output. Returns d(out)/d(p) for every
  // registered Parameter. Non-parameter leaves receive no gradient.
  GradMap backward(Var out) const;

  // Same sweep, but adds the gradients into each Parameter's accumulator.
  void backward_accumulate(Var out) const;

  // Recomputes every slot from the leaves with the same kernels; returns
  // the recomputed values (bit-identical to the stored ones).
  std::vector<Tensor> replay() const;

 private:
  struct Node {
    Op op = Op::kLeaf;
    std::array<int, 2> in{-1, -1};
    int n_in = 0;
    int axis = -1;            // sum-over-axis
    double scalar = 0.0;      // scalar-mul
    bool canonical = false;   // order-insensitive reduction
    Shape target;             // broadcast
  };

  Var push(Node node, Tensor value);
  Var check_owned(Var v, const char* op) const;
  Tensor compute(const Node& node, const std::vector<Tensor>& vals) const;
  std::vector<std::optional<Tensor>> grad_sweep(Var out) const;

  std::vector<Node> nodes_;
  std::vector<Tensor> vals_;
  std::vector<bool> needs_grad_;
  std::vector<const Parameter*> param_of_;
  std::unordered_map<const Parameter*, int> param_slot_;
};

// Model-level log policy: log(max(x, eps)) built from primitives, so the
// tape never sees log of a non-positive value.
Var clamped_log(Record& rec, Var x, double eps = 1e-12);

// sqrt(x) for strictly positive x as exp(0.5 * log x).
Var sqrt_positive(Record& rec, Var x);

}  // namespace gmatch
