#include "ctaylor/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace ctaylor {

namespace {

template <class T>
struct Dual {
  T v;
  T d;
};

inline double sin_(double x) { return std::sin(x); }
inline double cos_(double x) { return std::cos(x); }
inline double tanh_(double x) { return std::tanh(x); }
inline double exp_(double x) { return std::exp(x); }

template <class T>
Dual<T> operator+(const Dual<T>& a, const Dual<T>& b) {
  return {a.v + b.v, a.d + b.d};
}
template <class T>
Dual<T> operator*(const Dual<T>& a, const Dual<T>& b) {
  return {a.v * b.v, a.v * b.d + a.d * b.v};
}
template <class T>
Dual<T> operator*(double s, const Dual<T>& a) {
  return {s * a.v, s * a.d};
}
// constants on the left: 1 - t^2, bias + Wx
template <class T>
Dual<T> operator+(double s, const Dual<T>& a) {
  return {s + a.v, a.d};
}
template <class T>
Dual<T> sin_(const Dual<T>& a) {
  return {sin_(a.v), cos_(a.v) * a.d};
}
template <class T>
Dual<T> cos_(const Dual<T>& a) {
  return {cos_(a.v), -1.0 * (sin_(a.v) * a.d)};
}
template <class T>
Dual<T> tanh_(const Dual<T>& a) {
  T t = tanh_(a.v);
  return {t, (1.0 + -1.0 * (t * t)) * a.d};
}
template <class T>
Dual<T> exp_(const Dual<T>& a) {
  T e = exp_(a.v);
  return {e, e * a.d};
}

template <int K>
struct Nest {
  using type = Dual<typename Nest<K - 1>::type>;
};
template <>
struct Nest<0> {
  using type = double;
};

template <int K>
typename Nest<K>::type constant(double c) {
  if constexpr (K == 0) {
    return c;
  } else {
    return {constant<K - 1>(c), constant<K - 1>(0.0)};
  }
}

// x0 + sum_l eps_l seeds[l] with one dual layer per seed.
template <int K>
typename Nest<K>::type lift(double x, const std::array<double, 4>& seeds) {
  if constexpr (K == 0) {
    return x;
  } else {
    return {lift<K - 1>(x, seeds), constant<K - 1>(seeds[K - 1])};
  }
}

template <int K>
double innermost(const typename Nest<K>::type& v) {
  if constexpr (K == 0) {
    return v;
  } else {
    return innermost<K - 1>(v.d);
  }
}

template <class T>
T apply_unary(UnaryFn fn, const T& x) {
  switch (fn) {
    case UnaryFn::Sin: return sin_(x);
    case UnaryFn::Cos: return cos_(x);
    case UnaryFn::Tanh: return tanh_(x);
    case UnaryFn::Exp: return exp_(x);
  }
  throw std::logic_error("unknown unary function");
}

template <class T>
std::vector<T> interpret(const Program& program, std::vector<T> input) {
  std::vector<std::vector<T>> values(program.size());
  for (std::size_t id = 0; id < program.size(); ++id) {
    const ProgramNode& node = program.node(static_cast<int>(id));
    if (!node.op) {
      values[id] = input;
      continue;
    }
    auto in = [&](std::size_t i) -> const std::vector<T>& { return values[static_cast<std::size_t>(node.inputs[i])]; };
    std::vector<T> out;
    std::visit(
        [&](const auto& op) {
          using Op = std::decay_t<decltype(op)>;
          if constexpr (std::is_same_v<Op, prim::Affine>) {
            const std::vector<T>& x = in(0);
            const std::size_t rows = op.weight.dim(0);
            const std::size_t cols = op.weight.dim(1);
            if (x.size() != cols) throw ShapeError("affine input width mismatch");
            for (std::size_t r = 0; r < rows; ++r) {
              T acc = op.weight[r * cols] * x[0];
              for (std::size_t c = 1; c < cols; ++c) acc = acc + op.weight[r * cols + c] * x[c];
              out.push_back(op.bias[r] + acc);
            }
          } else if constexpr (std::is_same_v<Op, prim::Unary>) {
            for (const T& v : in(0)) out.push_back(apply_unary(op.fn, v));
          } else if constexpr (std::is_same_v<Op, prim::Hadamard>) {
            for (std::size_t i = 0; i < in(0).size(); ++i) out.push_back(in(0)[i] * in(1)[i]);
          } else if constexpr (std::is_same_v<Op, prim::Add>) {
            for (std::size_t i = 0; i < in(0).size(); ++i) out.push_back(in(0)[i] + in(1)[i]);
          } else {
            for (const T& v : in(0)) out.push_back(op.factor * v);
          }
        },
        *node.op);
    values[id] = std::move(out);
  }
  return values[static_cast<std::size_t>(program.output_id())];
}

void check_point(const Tensor& x0) {
  if (x0.rank() != 1) throw ShapeError("oracle expects a single point of shape (D), got " + to_string(x0.shape()));
}

template <int K>
std::vector<double> entry(const Program& program, const Tensor& x0, const std::vector<std::size_t>& idx) {
  using T = typename Nest<K>::type;
  std::vector<T> input;
  for (std::size_t i = 0; i < x0.numel(); ++i) {
    std::array<double, 4> seeds{};
    for (int l = 0; l < K; ++l) seeds[static_cast<std::size_t>(l)] = idx[static_cast<std::size_t>(l)] == i ? 1.0 : 0.0;
    input.push_back(lift<K>(x0[i], seeds));
  }
  std::vector<double> out;
  for (const T& y : interpret(program, std::move(input))) out.push_back(innermost<K>(y));
  return out;
}

std::vector<double> entry_any(const Program& program, const Tensor& x0, const std::vector<std::size_t>& idx) {
  switch (idx.size()) {
    case 1: return entry<1>(program, x0, idx);
    case 2: return entry<2>(program, x0, idx);
    case 3: return entry<3>(program, x0, idx);
    case 4: return entry<4>(program, x0, idx);
  }
  throw std::out_of_range("oracle supports derivative orders 1 to 4");
}

}  // namespace

Tensor evaluate_program(const Program& program, const Tensor& x0) {
  check_point(x0);
  std::vector<double> in(x0.data().begin(), x0.data().end());
  std::vector<double> out = interpret(program, std::move(in));
  return Tensor::vector(std::move(out));
}

Tensor oracle_entry(const Program& program, const Tensor& x0, const std::vector<std::size_t>& idx) {
  check_point(x0);
  for (std::size_t i : idx)
    if (i >= x0.numel()) throw std::out_of_range("derivative index out of range");
  return Tensor::vector(entry_any(program, x0, idx));
}

Tensor oracle_derivative(const Program& program, const Tensor& x0, int k) {
  check_point(x0);
  if (k < 1 || k > 4) throw std::out_of_range("oracle supports derivative orders 1 to 4");
  const std::size_t D = x0.numel();
  const std::size_t C = evaluate_program(program, x0).numel();
  Shape shape{C};
  for (int l = 0; l < k; ++l) shape.push_back(D);
  Tensor out = Tensor::zeros(shape);
  std::size_t block = 1;
  for (int l = 0; l < k; ++l) block *= D;

  std::vector<std::size_t> idx(static_cast<std::size_t>(k), 0);
  while (true) {
    std::vector<double> value = entry_any(program, x0, idx);
    // scatter to every permutation of the sorted tuple
    std::vector<std::size_t> perm = idx;
    do {
      std::size_t flat = 0;
      for (std::size_t p : perm) flat = flat * D + p;
      for (std::size_t c = 0; c < C; ++c) out[c * block + flat] = value[c];
    } while (std::next_permutation(perm.begin(), perm.end()));
    // next non-decreasing tuple
    int pos = k - 1;
    while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == D - 1) --pos;
    if (pos < 0) break;
    const std::size_t v = idx[static_cast<std::size_t>(pos)] + 1;
    for (std::size_t l = static_cast<std::size_t>(pos); l < idx.size(); ++l) idx[l] = v;
  }
  return out;
}

Tensor oracle_laplacian(const Program& program, const Tensor& x0) {
  check_point(x0);
  Tensor total;
  for (std::size_t d = 0; d < x0.numel(); ++d) {
    Tensor e = oracle_entry(program, x0, {d, d});
    total = d == 0 ? e : add(total, e);
  }
  return total;
}

Tensor oracle_biharmonic(const Program& program, const Tensor& x0) {
  check_point(x0);
  Tensor total;
  for (std::size_t a = 0; a < x0.numel(); ++a)
    for (std::size_t b = 0; b < x0.numel(); ++b) {
      Tensor e = oracle_entry(program, x0, {a, a, b, b});
      total = (a == 0 && b == 0) ? e : add(total, e);
    }
  return total;
}

Tensor finite_difference(const Program& program, const Tensor& x0, const Tensor& v, int k, double h) {
  check_point(x0);
  if (v.shape() != x0.shape()) throw ShapeError("direction must match the input shape");
  if (k < 1 || k > 4) throw std::out_of_range("finite differences support orders 1 to 4");
  if (h <= 0.0) h = k <= 2 ? 1e-2 : (k == 3 ? 2e-2 : 4e-2);
  auto g = [&](double t) { return evaluate_program(program, add(x0, scale(v, t))); };
  // Central stencils, error O(h^2) with an even expansion in h.
  auto stencil = [&](double s) {
    switch (k) {
      case 1: return scale(sub(g(s), g(-s)), 1.0 / (2.0 * s));
      case 2: return scale(add(sub(g(s), scale(g(0.0), 2.0)), g(-s)), 1.0 / (s * s));
      case 3:
        return scale(add(sub(g(2 * s), scale(g(s), 2.0)), sub(scale(g(-s), 2.0), g(-2 * s))), 1.0 / (2.0 * s * s * s));
      default:
        return scale(add(add(sub(g(2 * s), scale(g(s), 4.0)), scale(g(0.0), 6.0)), sub(g(-2 * s), scale(g(-s), 4.0))),
                     1.0 / (s * s * s * s));
    }
  };
  Tensor coarse = stencil(h);
  Tensor fine = stencil(h / 2);
  return scale(sub(scale(fine, 4.0), coarse), 1.0 / 3.0);
}

}  // namespace ctaylor
