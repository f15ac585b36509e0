#include "elementwise.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace ctaylor::detail {

namespace {

// Coefficients of P_k with tanh^(k)(x) = P_k(tanh x); P_0(T) = T and
// P_{k+1}(T) = P_k'(T) (1 - T^2).
using Poly = std::array<double, kMaxDegree + 2>;

const std::array<Poly, kMaxDegree + 1>& tanh_polys() {
  static const std::array<Poly, kMaxDegree + 1> table = [] {
    std::array<Poly, kMaxDegree + 1> t{};
    t[0][1] = 1.0;
    for (int k = 0; k < kMaxDegree; ++k) {
      Poly deriv{};
      for (std::size_t p = 1; p < deriv.size(); ++p) deriv[p - 1] = static_cast<double>(p) * t[k][p];
      Poly next{};
      for (std::size_t p = 0; p + 2 < next.size(); ++p) {
        next[p] += deriv[p];
        next[p + 2] -= deriv[p];
      }
      t[k + 1] = next;
    }
    return t;
  }();
  return table;
}

}  // namespace

double tanh_derivative(int order, double t) {
  if (order < 0 || order > kMaxDegree) throw std::out_of_range("tanh derivative order out of range");
  const Poly& p = tanh_polys()[static_cast<std::size_t>(order)];
  double acc = 0.0;
  for (std::size_t i = p.size(); i-- > 0;) acc = acc * t + p[i];
  return acc;
}

Tensor apply_elementwise(Elementwise op, const Tensor& x) {
  switch (op) {
    case Elementwise::Sin: return map(x, [](double v) { return std::sin(v); });
    case Elementwise::Cos: return map(x, [](double v) { return std::cos(v); });
    case Elementwise::Tanh: return map(x, [](double v) { return std::tanh(v); });
    case Elementwise::Exp: return map(x, [](double v) { return std::exp(v); });
    case Elementwise::Neg: return map(x, [](double v) { return -v; });
  }
  throw std::logic_error("unknown elementwise op");
}

Tensor apply_tanh_derivative(int order, const Tensor& t) {
  return map(t, [order](double v) { return tanh_derivative(order, v); });
}

}  // namespace ctaylor::detail
