#pragma once

#include "ctaylor/tensor.hpp"
#include "rules.hpp"

namespace ctaylor::detail {

// k-th derivative of tanh expressed through t = tanh(x).
double tanh_derivative(int order, double t);

Tensor apply_elementwise(Elementwise op, const Tensor& x);
Tensor apply_tanh_derivative(int order, const Tensor& t);

}  // namespace ctaylor::detail
