#include "ctaylor/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>

namespace ctaylor {

std::size_t numel(const Shape& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

std::string to_string(const Shape& shape) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ',';
    os << shape[i];
  }
  os << ')';
  return os.str();
}

Tensor::Tensor(Shape shape, std::vector<double> data) : shape_(std::move(shape)), data_(std::move(data)) {
  if (data_.size() != ctaylor::numel(shape_)) {
    throw ShapeError("tensor data has " + std::to_string(data_.size()) + " entries, shape " +
                     to_string(shape_) + " needs " + std::to_string(ctaylor::numel(shape_)));
  }
}

Tensor Tensor::zeros(Shape shape) { return full(std::move(shape), 0.0); }

Tensor Tensor::full(Shape shape, double value) {
  std::size_t n = ctaylor::numel(shape);
  return Tensor(std::move(shape), std::vector<double>(n, value));
}

Tensor Tensor::scalar(double value) { return Tensor({}, {value}); }

Tensor Tensor::vector(std::vector<double> values) {
  std::size_t n = values.size();
  return Tensor({n}, std::move(values));
}

Tensor Tensor::matrix(std::size_t rows, std::size_t cols, std::vector<double> values) {
  return Tensor({rows, cols}, std::move(values));
}

std::size_t Tensor::dim(std::size_t axis) const {
  if (axis >= shape_.size()) throw ShapeError("axis " + std::to_string(axis) + " out of range for " + to_string(shape_));
  return shape_[axis];
}

Shape Tensor::trailing_shape() const {
  if (shape_.empty()) throw ShapeError("rank-0 tensor has no leading axis");
  return Shape(shape_.begin() + 1, shape_.end());
}

std::size_t Tensor::offset(std::initializer_list<std::size_t> index) const {
  if (index.size() != shape_.size()) throw ShapeError("index rank does not match " + to_string(shape_));
  std::size_t off = 0;
  std::size_t axis = 0;
  for (std::size_t i : index) {
    if (i >= shape_[axis]) throw ShapeError("index out of range for " + to_string(shape_));
    off = off * shape_[axis] + i;
    ++axis;
  }
  return off;
}

double Tensor::at(std::initializer_list<std::size_t> index) const { return data_[offset(index)]; }
double& Tensor::at(std::initializer_list<std::size_t> index) { return data_[offset(index)]; }

Tensor Tensor::row(std::size_t i) const {
  Shape rest = trailing_shape();
  if (i >= shape_[0]) throw ShapeError("row index out of range for " + to_string(shape_));
  std::size_t n = ctaylor::numel(rest);
  return Tensor(rest, std::vector<double>(data_.begin() + static_cast<std::ptrdiff_t>(i * n),
                                          data_.begin() + static_cast<std::ptrdiff_t>((i + 1) * n)));
}

Tensor Tensor::reshaped(Shape shape) const { return Tensor(std::move(shape), data_); }

bool Tensor::identical(const Tensor& other) const {
  return shape_ == other.shape_ &&
         std::memcmp(data_.data(), other.data_.data(), data_.size() * sizeof(double)) == 0;
}

namespace {

enum class Broadcast { None, Left, Right };

// Left: a carries the extra leading axis.
Broadcast broadcast_kind(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() == b.shape()) return Broadcast::None;
  if (a.rank() == b.rank() + 1 && a.trailing_shape() == b.shape()) return Broadcast::Left;
  if (b.rank() == a.rank() + 1 && b.trailing_shape() == a.shape()) return Broadcast::Right;
  throw ShapeError(std::string(op) + ": incompatible shapes " + to_string(a.shape()) + " and " +
                   to_string(b.shape()));
}

template <class F>
Tensor binary(const Tensor& a, const Tensor& b, const char* name, F op) {
  Broadcast kind = broadcast_kind(a, b, name);
  const Tensor& big = kind == Broadcast::Right ? b : a;
  Tensor out = Tensor::zeros(big.shape());
  auto o = out.data();
  auto x = a.data();
  auto y = b.data();
  switch (kind) {
    case Broadcast::None:
      for (std::size_t i = 0; i < o.size(); ++i) o[i] = op(x[i], y[i]);
      break;
    case Broadcast::Left:
      for (std::size_t i = 0; i < o.size(); ++i) o[i] = op(x[i], y[i % y.size()]);
      break;
    case Broadcast::Right:
      for (std::size_t i = 0; i < o.size(); ++i) o[i] = op(x[i % x.size()], y[i]);
      break;
  }
  return out;
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  return binary(a, b, "add", [](double x, double y) { return x + y; });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  return binary(a, b, "sub", [](double x, double y) { return x - y; });
}

Tensor hadamard(const Tensor& a, const Tensor& b) {
  return binary(a, b, "hadamard", [](double x, double y) { return x * y; });
}

Tensor scale(const Tensor& a, double c) {
  return map(a, [c](double v) { return c * v; });
}

Tensor sum_leading(const Tensor& a) {
  Shape rest = a.trailing_shape();
  Tensor out = Tensor::zeros(rest);
  auto o = out.data();
  auto x = a.data();
  std::size_t n = o.size();
  for (std::size_t r = 0; r < a.dim(0); ++r)
    for (std::size_t i = 0; i < n; ++i) o[i] += x[r * n + i];
  return out;
}

Tensor replicate(const Tensor& a, std::size_t copies) {
  Shape shape{copies};
  shape.insert(shape.end(), a.shape().begin(), a.shape().end());
  std::vector<double> data;
  data.reserve(copies * a.numel());
  for (std::size_t r = 0; r < copies; ++r) data.insert(data.end(), a.data().begin(), a.data().end());
  return Tensor(std::move(shape), std::move(data));
}

Tensor stack(std::span<const Tensor> parts) {
  if (parts.empty()) throw ShapeError("stack: no parts");
  Shape shape{parts.size()};
  shape.insert(shape.end(), parts[0].shape().begin(), parts[0].shape().end());
  std::vector<double> data;
  data.reserve(ctaylor::numel(shape));
  for (const Tensor& p : parts) {
    if (p.shape() != parts[0].shape()) throw ShapeError("stack: parts differ in shape");
    data.insert(data.end(), p.data().begin(), p.data().end());
  }
  return Tensor(std::move(shape), std::move(data));
}

Tensor linear(const Tensor& x, const Tensor& weight) {
  if (weight.rank() != 2) throw ShapeError("linear: weight must be a matrix, got " + to_string(weight.shape()));
  if (x.rank() == 0 || x.shape().back() != weight.dim(1)) {
    throw ShapeError("linear: input " + to_string(x.shape()) + " does not match weight " +
                     to_string(weight.shape()));
  }
  const std::size_t in = weight.dim(1);
  const std::size_t out_dim = weight.dim(0);
  const std::size_t rows = x.numel() / in;
  Shape shape = x.shape();
  shape.back() = out_dim;
  Tensor out = Tensor::zeros(shape);
  auto o = out.data();
  auto xs = x.data();
  auto w = weight.data();
  for (std::size_t m = 0; m < rows; ++m) {
    const double* xr = xs.data() + m * in;
    for (std::size_t j = 0; j < out_dim; ++j) {
      const double* wr = w.data() + j * in;
      double s0 = 0, s1 = 0, s2 = 0, s3 = 0;
      std::size_t i = 0;
      for (; i + 4 <= in; i += 4) {
        s0 += xr[i] * wr[i];
        s1 += xr[i + 1] * wr[i + 1];
        s2 += xr[i + 2] * wr[i + 2];
        s3 += xr[i + 3] * wr[i + 3];
      }
      for (; i < in; ++i) s0 += xr[i] * wr[i];
      o[m * out_dim + j] = (s0 + s1) + (s2 + s3);
    }
  }
  return out;
}

Tensor affine(const Tensor& x, const Tensor& weight, const Tensor& bias) {
  if (bias.rank() != 1 || bias.dim(0) != weight.dim(0)) {
    throw ShapeError("affine: bias " + to_string(bias.shape()) + " does not match weight " +
                     to_string(weight.shape()));
  }
  Tensor out = linear(x, weight);
  auto o = out.data();
  auto b = bias.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] += b[i % b.size()];
  return out;
}

Tensor batched_product(std::span<const Tensor* const> operands, const std::vector<bool>& batched, double coef,
                       bool reduce) {
  if (operands.empty() || operands.size() != batched.size()) throw ShapeError("batched_product: bad operand list");
  const Tensor* lead = nullptr;
  Shape element;
  bool have_element = false;
  for (std::size_t j = 0; j < operands.size(); ++j) {
    Shape s = batched[j] ? operands[j]->trailing_shape() : operands[j]->shape();
    if (!have_element) {
      element = s;
      have_element = true;
    } else if (s != element) {
      throw ShapeError("batched_product: operand shapes " + to_string(operands[0]->shape()) + " and " +
                       to_string(operands[j]->shape()) + " disagree");
    }
    if (batched[j]) {
      if (lead && lead->dim(0) != operands[j]->dim(0)) throw ShapeError("batched_product: direction counts differ");
      lead = operands[j];
    }
  }
  const std::size_t n = ctaylor::numel(element);
  const std::size_t copies = lead ? lead->dim(0) : 1;
  const bool out_batched = lead && !reduce;
  Shape out_shape = element;
  if (out_batched) out_shape.insert(out_shape.begin(), copies);
  if (reduce && !lead) throw ShapeError("batched_product: nothing to reduce");
  Tensor out = Tensor::zeros(out_shape);
  auto o = out.data();
  for (std::size_t r = 0; r < copies; ++r) {
    double* dst = o.data() + (out_batched ? r * n : 0);
    for (std::size_t i = 0; i < n; ++i) {
      double p = batched[0] ? (*operands[0])[r * n + i] : (*operands[0])[i];
      for (std::size_t j = 1; j < operands.size(); ++j)
        p *= batched[j] ? (*operands[j])[r * n + i] : (*operands[j])[i];
      if (coef != 1.0) p *= coef;
      if (reduce)
        dst[i] += p;
      else
        dst[i] = p;
    }
  }
  return out;
}

Tensor inner(const Tensor& a, const Tensor& b) {
  if (b.rank() > a.rank() ||
      !std::equal(b.shape().begin(), b.shape().end(), a.shape().end() - static_cast<std::ptrdiff_t>(b.rank()))) {
    throw ShapeError("inner: " + to_string(b.shape()) + " does not match trailing axes of " + to_string(a.shape()));
  }
  Shape lead(a.shape().begin(), a.shape().end() - static_cast<std::ptrdiff_t>(b.rank()));
  Tensor out = Tensor::zeros(lead);
  const std::size_t n = b.numel();
  for (std::size_t m = 0; m < out.numel(); ++m) {
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) s += a[m * n + i] * b[i];
    out[m] = s;
  }
  return out;
}

Tensor outer_power(const Tensor& v, int k) {
  if (v.rank() != 1) throw ShapeError("outer_power: expected a vector, got " + to_string(v.shape()));
  if (k < 0) throw std::invalid_argument("outer_power: negative power");
  Tensor out = Tensor::scalar(1.0);
  for (int p = 0; p < k; ++p) {
    Shape shape = out.shape();
    shape.push_back(v.dim(0));
    std::vector<double> data;
    data.reserve(out.numel() * v.numel());
    for (double x : out.data())
      for (double y : v.data()) data.push_back(x * y);
    out = Tensor(std::move(shape), std::move(data));
  }
  return out;
}

double max_abs(const Tensor& a) {
  double m = 0;
  for (double v : a.data()) m = std::max(m, std::abs(v));
  return m;
}

double max_abs_diff(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) throw ShapeError("max_abs_diff: " + to_string(a.shape()) + " vs " + to_string(b.shape()));
  double m = 0;
  for (std::size_t i = 0; i < a.numel(); ++i) {
    double d = std::abs(a[i] - b[i]);
    if (std::isnan(d)) return d;
    m = std::max(m, d);
  }
  return m;
}

double relative_error(const Tensor& a, const Tensor& b, double floor) {
  return max_abs_diff(a, b) / std::max(max_abs(b), floor);
}

}  // namespace ctaylor
