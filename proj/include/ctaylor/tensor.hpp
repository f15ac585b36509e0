#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ctaylor {

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using Shape = std::vector<std::size_t>;

std::size_t numel(const Shape& shape);
std::string to_string(const Shape& shape);

// Dense row-major tensor of doubles. Rank 0 holds a single scalar.
class Tensor {
 public:
  Tensor() : data_(1, 0.0) {}
  Tensor(Shape shape, std::vector<double> data);

  static Tensor zeros(Shape shape);
  static Tensor full(Shape shape, double value);
  static Tensor scalar(double value);
  static Tensor vector(std::vector<double> values);
  static Tensor matrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t numel() const { return data_.size(); }
  std::size_t dim(std::size_t axis) const;

  // Shape with the leading axis removed.
  Shape trailing_shape() const;

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  double at(std::initializer_list<std::size_t> index) const;
  double& at(std::initializer_list<std::size_t> index);

  // Slice along the leading axis.
  Tensor row(std::size_t i) const;

  Tensor reshaped(Shape shape) const;

  // Bitwise equality of shape and contents.
  bool identical(const Tensor& other) const;

 private:
  std::size_t offset(std::initializer_list<std::size_t> index) const;

  Shape shape_;
  std::vector<double> data_;
};

// Elementwise binary ops. Shapes must match, or one operand may carry one
// extra leading axis, in which case the other is broadcast along it.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor hadamard(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double c);

template <class F>
Tensor map(const Tensor& a, F&& fn) {
  Tensor out = a;
  for (double& v : out.data()) v = fn(v);
  return out;
}

// Sum over the leading axis.
Tensor sum_leading(const Tensor& a);
// Stack R copies along a new leading axis.
Tensor replicate(const Tensor& a, std::size_t copies);
Tensor stack(std::span<const Tensor> parts);

// x (..., in) times W^T with W (out, in) -> (..., out).
Tensor linear(const Tensor& x, const Tensor& weight);
Tensor affine(const Tensor& x, const Tensor& weight, const Tensor& bias);

// Product of operands that share a trailing shape. Operands flagged batched
// carry an extra leading axis of extent R. The result is scaled by coef and,
// when reduce is set, summed over the leading axis.
Tensor batched_product(std::span<const Tensor* const> operands, const std::vector<bool>& batched,
                       double coef, bool reduce);

// Broadcasting inner product: contracts all axes of b against the trailing
// axes of a, returning a tensor with a's leading axes.
Tensor inner(const Tensor& a, const Tensor& b);

// v^{(x)k} for a vector v; k = 0 yields the scalar 1.
Tensor outer_power(const Tensor& v, int k);

double max_abs(const Tensor& a);
double max_abs_diff(const Tensor& a, const Tensor& b);
// max|a-b| / max(max|b|, floor)
double relative_error(const Tensor& a, const Tensor& b, double floor = 1e-300);

}  // namespace ctaylor
