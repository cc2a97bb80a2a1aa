#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace gmatch {

using Shape = std::vector<int>;

std::string shape_to_string(const Shape& s);
std::int64_t shape_numel(const Shape& s);

// Dense row-major tensor of doubles. Rank 0 (shape {}) is a scalar holding
// exactly one value. Values are expected to stay finite through every
// forward operation; ops that can produce non-finite values check for it.
class Tensor {
 public:
  Tensor() : Tensor(Shape{}) {}
  explicit Tensor(Shape shape);
  Tensor(Shape shape, std::vector<double> values);

  static Tensor scalar(double v);
  static Tensor zeros(Shape shape) { return Tensor(std::move(shape)); }
  static Tensor ones(Shape shape);
  static Tensor full(Shape shape, double v);

  int rank() const { return static_cast<int>(shape_.size()); }
  const Shape& shape() const { return shape_; }
  int dim(int axis) const { return shape_.at(axis); }
  std::int64_t numel() const { return static_cast<std::int64_t>(v_.size()); }

  double* data() { return v_.data(); }
  const double* data() const { return v_.data(); }
  std::vector<double>& values() { return v_; }
  const std::vector<double>& values() const { return v_; }

  double& at(int i) { return v_[static_cast<std::size_t>(i)]; }
  double at(int i) const { return v_[static_cast<std::size_t>(i)]; }
  double& at(int i, int j) { return v_[static_cast<std::size_t>(i) * shape_[1] + j]; }
  double at(int i, int j) const { return v_[static_cast<std::size_t>(i) * shape_[1] + j]; }

  double scalar_value() const;

  bool requires_grad() const { return requires_grad_; }
  Tensor& set_requires_grad(bool v) {
    requires_grad_ = v;
    return *this;
  }

  bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }
  bool all_finite() const;
  Tensor transposed() const;  // rank-2 only

 private:
  Shape shape_;
  std::vector<double> v_;
  bool requires_grad_ = false;
};

// Learnable tensor plus its gradient accumulator (same shape, zero after
// reset_grad).
struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;

  Parameter() = default;
  Parameter(std::string name_, Tensor value_)
      : name(std::move(name_)), value(std::move(value_)), grad(value.shape()) {
    value.set_requires_grad(true);
  }

  void reset_grad();
  std::int64_t numel() const { return value.numel(); }
};

}  // namespace gmatch
