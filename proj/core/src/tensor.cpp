#include "gmatch/tensor.hpp"

#include <cmath>
#include <sstream>

#include "gmatch/error.hpp"

namespace gmatch {

std::string shape_to_string(const Shape& s) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) os << ",";
    os << s[i];
  }
  os << "]";
  return os.str();
}

std::int64_t shape_numel(const Shape& s) {
  std::int64_t n = 1;
  for (int d : s) n *= d;
  return n;
}

Tensor::Tensor(Shape shape) : shape_(std::move(shape)) {
  for (int d : shape_) {
    if (d < 0) throw ShapeError("Tensor: negative dimension in " + shape_to_string(shape_));
  }
  v_.assign(static_cast<std::size_t>(shape_numel(shape_)), 0.0);
}

Tensor::Tensor(Shape shape, std::vector<double> values) : shape_(std::move(shape)), v_(std::move(values)) {
  if (static_cast<std::int64_t>(v_.size()) != shape_numel(shape_)) {
    throw ShapeError("Tensor: " + std::to_string(v_.size()) + " values do not fill shape " +
                     shape_to_string(shape_));
  }
}

Tensor Tensor::scalar(double v) { return Tensor(Shape{}, {v}); }

Tensor Tensor::ones(Shape shape) { return full(std::move(shape), 1.0); }

Tensor Tensor::full(Shape shape, double v) {
  Tensor t(std::move(shape));
  for (double& x : t.v_) x = v;
  return t;
}

double Tensor::scalar_value() const {
  if (v_.size() != 1) {
    throw ShapeError("scalar_value: tensor of shape " + shape_to_string(shape_) + " is not a scalar");
  }
  return v_[0];
}

bool Tensor::all_finite() const {
  for (double x : v_) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

Tensor Tensor::transposed() const {
  if (rank() != 2) throw ShapeError("transposed: rank-2 tensor required, got " + shape_to_string(shape_));
  Tensor out(Shape{shape_[1], shape_[0]});
  for (int i = 0; i < shape_[0]; ++i) {
    for (int j = 0; j < shape_[1]; ++j) out.at(j, i) = at(i, j);
  }
  return out;
}

void Parameter::reset_grad() {
  for (double& g : grad.values()) g = 0.0;
}

}  // namespace gmatch
