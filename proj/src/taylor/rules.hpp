#pragma once

// Taylor propagation rules written once against a builder interface. The
// eager builder computes tensors, the graph builder appends IR nodes; both
// see the identical sequence of operations.
//
// Builder requirements (V = Builder::Value):
//   V elementwise(Elementwise, const V&)
//   V tanh_derivative(int order, const V& t)
//   V contract(double coef, const std::vector<V>&, bool reduce)
//   V add(const V&, const V&)
//   V scale(double, const V&)
//   V scale_by_directions(const V&)
//   V affine(const V&, const prim::Affine&, int node)
//   V linear(const V&, const prim::Affine&, int node)
//   bool batched(const V&)
//   void tag(const V&, int node, int degree, int group)

#include <optional>
#include <stdexcept>
#include <vector>

#include "ctaylor/partitions.hpp"
#include "ctaylor/program.hpp"

namespace ctaylor::detail {

enum class Elementwise { Sin, Cos, Tanh, Exp, Neg };

template <class V>
struct JetValues {
  V primal;
  std::vector<std::optional<V>> coeffs;  // coeffs[k - 1]; empty optional = structural zero

  const std::optional<V>& coeff(int k) const { return coeffs[static_cast<std::size_t>(k - 1)]; }
};

struct RuleContext {
  int degree = 0;
  bool collapsed_top = false;
  int node = 0;
  int group = 0;
};

inline Elementwise elementwise_of(UnaryFn fn) {
  switch (fn) {
    case UnaryFn::Sin: return Elementwise::Sin;
    case UnaryFn::Cos: return Elementwise::Cos;
    case UnaryFn::Tanh: return Elementwise::Tanh;
    case UnaryFn::Exp: return Elementwise::Exp;
  }
  throw std::logic_error("unknown unary function");
}

// d_0..d_K of a unary function evaluated at x0; d_0 is the function value.
template <class B, class V = typename B::Value>
std::vector<V> derivative_ladder(B& b, UnaryFn fn, const V& x0, int degree) {
  std::vector<V> d;
  d.push_back(b.elementwise(elementwise_of(fn), x0));
  if (degree == 0) return d;
  switch (fn) {
    case UnaryFn::Exp:
      for (int k = 1; k <= degree; ++k) d.push_back(d[0]);
      break;
    case UnaryFn::Tanh:
      for (int k = 1; k <= degree; ++k) d.push_back(b.tanh_derivative(k, d[0]));
      break;
    case UnaryFn::Sin:
    case UnaryFn::Cos: {
      // sin: (sin, cos, -sin, -cos); cos: (cos, -sin, -cos, sin)
      bool is_sin = fn == UnaryFn::Sin;
      V other = b.elementwise(is_sin ? Elementwise::Cos : Elementwise::Sin, x0);
      V d1 = is_sin ? other : b.elementwise(Elementwise::Neg, other);
      d.push_back(d1);
      if (degree >= 2) d.push_back(b.elementwise(Elementwise::Neg, d[0]));
      if (degree >= 3) d.push_back(is_sin ? b.elementwise(Elementwise::Neg, other) : other);
      for (int k = 4; k <= degree; ++k) d.push_back(d[static_cast<std::size_t>(k - 4)]);
      break;
    }
  }
  return d;
}

template <class B, class V = typename B::Value>
void accumulate(B& b, std::optional<V>& acc, V term) {
  if (acc)
    acc = b.add(*acc, term);
  else
    acc = std::move(term);
}

// A nonlinear term of the collapsed top coefficient: summed over directions.
template <class B, class V = typename B::Value>
V summed_term(B& b, double coef, const std::vector<V>& ops) {
  for (const V& v : ops)
    if (b.batched(v)) return b.contract(coef, ops, true);
  return b.scale_by_directions(b.contract(coef, ops, false));
}

template <class B, class V = typename B::Value>
JetValues<V> unary_rule(B& b, UnaryFn fn, const JetValues<V>& x, const RuleContext& ctx) {
  const int K = ctx.degree;
  std::vector<V> d = derivative_ladder(b, fn, x.primal, K);
  JetValues<V> out{d[0], {}};
  for (int k = 1; k <= K; ++k) {
    const bool top = ctx.collapsed_top && k == K;
    std::optional<V> acc;
    for (const Partition& sigma : partitions(k)) {
      std::vector<V> ops{d[static_cast<std::size_t>(sigma.size())]};
      bool zero = false;
      for (int s : sigma.parts) {
        if (!x.coeff(s)) {
          zero = true;
          break;
        }
        ops.push_back(*x.coeff(s));
      }
      if (zero) continue;
      double nu = static_cast<double>(sigma.multiplicity);
      accumulate(b, acc, top && !sigma.trivial() ? summed_term(b, nu, ops) : b.contract(nu, ops, false));
    }
    out.coeffs.push_back(acc);
  }
  return out;
}

template <class B, class V = typename B::Value>
JetValues<V> hadamard_rule(B& b, const JetValues<V>& x, const JetValues<V>& y, const RuleContext& ctx) {
  const int K = ctx.degree;
  auto get = [](const JetValues<V>& j, int k) -> std::optional<V> {
    return k == 0 ? std::optional<V>(j.primal) : j.coeff(k);
  };
  JetValues<V> out{b.contract(1.0, {x.primal, y.primal}, false), {}};
  for (int k = 1; k <= K; ++k) {
    const bool top = ctx.collapsed_top && k == K;
    std::optional<V> acc;
    for (int i = 0; i <= k; ++i) {
      std::optional<V> a = get(x, i);
      std::optional<V> c = get(y, k - i);
      if (!a || !c) continue;
      double coef = static_cast<double>(binomial(k, i));
      bool linear_part = i == 0 || i == k;
      accumulate(b, acc, top && !linear_part ? summed_term(b, coef, {*a, *c}) : b.contract(coef, {*a, *c}, false));
    }
    out.coeffs.push_back(acc);
  }
  return out;
}

template <class B, class V = typename B::Value>
JetValues<V> apply_rule(B& b, const Primitive& op, const std::vector<const JetValues<V>*>& in,
                        const RuleContext& ctx) {
  const int K = ctx.degree;
  JetValues<V> out;
  if (const auto* a = std::get_if<prim::Affine>(&op)) {
    const JetValues<V>& x = *in[0];
    out.primal = b.affine(x.primal, *a, ctx.node);
    for (int k = 1; k <= K; ++k)
      out.coeffs.push_back(x.coeff(k) ? std::optional<V>(b.linear(*x.coeff(k), *a, ctx.node)) : std::nullopt);
  } else if (const auto* u = std::get_if<prim::Unary>(&op)) {
    out = unary_rule(b, u->fn, *in[0], ctx);
  } else if (std::holds_alternative<prim::Hadamard>(op)) {
    out = hadamard_rule(b, *in[0], *in[1], ctx);
  } else if (std::holds_alternative<prim::Add>(op)) {
    const JetValues<V>& x = *in[0];
    const JetValues<V>& y = *in[1];
    out.primal = b.add(x.primal, y.primal);
    for (int k = 1; k <= K; ++k) {
      std::optional<V> acc = x.coeff(k);
      if (y.coeff(k)) accumulate(b, acc, *y.coeff(k));
      out.coeffs.push_back(acc);
    }
  } else if (const auto* s = std::get_if<prim::Scale>(&op)) {
    const JetValues<V>& x = *in[0];
    out.primal = b.scale(s->factor, x.primal);
    for (int k = 1; k <= K; ++k)
      out.coeffs.push_back(x.coeff(k) ? std::optional<V>(b.scale(s->factor, *x.coeff(k))) : std::nullopt);
  }
  b.tag(out.primal, ctx.node, 0, 0);
  for (int k = 1; k <= K; ++k)
    if (out.coeff(k)) b.tag(*out.coeff(k), ctx.node, k, ctx.group);
  return out;
}

}  // namespace ctaylor::detail
