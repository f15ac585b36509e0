#include <numeric>

#include "ctaylor/graph.hpp"
#include "taylor/elementwise.hpp"

namespace ctaylor::ir {

namespace {

using detail::Elementwise;

Elementwise elementwise_of(Op op) {
  switch (op) {
    case Op::Sin: return Elementwise::Sin;
    case Op::Cos: return Elementwise::Cos;
    case Op::Tanh: return Elementwise::Tanh;
    case Op::Exp: return Elementwise::Exp;
    case Op::Neg: return Elementwise::Neg;
    default: throw std::logic_error("not an elementwise op");
  }
}

std::string where(NodeId id, const Node& n) { return "%" + std::to_string(id) + " (" + std::string(op_name(n.op)) + ")"; }

// Multiply-add proxy shared by evaluation and static analysis.
std::uint64_t node_flops(const Node& n, const std::vector<const Shape*>& in, const Shape& out) {
  const std::uint64_t size = numel(out);
  switch (n.op) {
    case Op::Sin:
    case Op::Cos:
    case Op::Tanh:
    case Op::Exp:
    case Op::Neg:
    case Op::Add:
    case Op::Scale: return size;
    case Op::TanhDeriv: return 2 * static_cast<std::uint64_t>(n.order + 1) * size;
    case Op::Sum: return numel(*in[0]);
    case Op::Contract: {
      std::uint64_t widest = 0;
      for (const Shape* s : in) widest = std::max<std::uint64_t>(widest, numel(*s));
      std::uint64_t per = in.size() - 1 + (n.factor != 1.0 ? 1 : 0) + (n.spec.reduces() ? 1 : 0);
      return widest * per;
    }
    case Op::Linear:
    case Op::Affine: {
      const Shape& w = *in[1];
      std::uint64_t rows = numel(*in[0]) / w[1];
      std::uint64_t f = 2 * rows * w[0] * w[1];
      if (n.op == Op::Affine) f += rows * w[0];
      return f;
    }
    default: return 0;
  }
}

Shape infer_shape(NodeId id, const Node& n, const std::vector<const Shape*>& in) {
  auto fail = [&](const std::string& msg) { return ShapeError(where(id, n) + ": " + msg); };
  switch (n.op) {
    case Op::Replicate: {
      Shape s{n.count};
      s.insert(s.end(), in[0]->begin(), in[0]->end());
      return s;
    }
    case Op::Sum:
      if (in[0]->empty()) throw fail("nothing to sum");
      return Shape(in[0]->begin() + 1, in[0]->end());
    case Op::Add: {
      const Shape& a = *in[0];
      const Shape& b = *in[1];
      if (a == b) return a;
      if (a.size() == b.size() + 1 && Shape(a.begin() + 1, a.end()) == b) return a;
      if (b.size() == a.size() + 1 && Shape(b.begin() + 1, b.end()) == a) return b;
      throw fail("incompatible shapes " + to_string(a) + " and " + to_string(b));
    }
    case Op::Contract: {
      std::optional<Shape> element;
      std::optional<std::size_t> r;
      if (n.spec.output) r = n.directions;
      for (std::size_t i = 0; i < in.size(); ++i) {
        const Shape& s = *in[i];
        if (n.spec.operands[i]) {
          if (s.empty()) throw fail("batched operand has no direction axis");
          if (r && s[0] != *r)
            throw fail("batched operand " + to_string(s) + " lacks " + std::to_string(*r) + " directions");
          r = s[0];
        }
        Shape e = n.spec.operands[i] ? Shape(s.begin() + 1, s.end()) : s;
        if (element && *element != e) throw fail("operand shapes disagree: " + to_string(*element) + " vs " + to_string(e));
        element = e;
      }
      Shape out = *element;
      if (n.spec.output) out.insert(out.begin(), n.directions);
      return out;
    }
    case Op::Linear:
    case Op::Affine: {
      const Shape& x = *in[0];
      const Shape& w = *in[1];
      if (w.size() != 2 || x.empty() || x.back() != w[1])
        throw fail("input " + to_string(x) + " does not match weight " + to_string(w));
      if (n.op == Op::Affine && (in[2]->size() != 1 || (*in[2])[0] != w[0]))
        throw fail("bias " + to_string(*in[2]) + " does not match weight " + to_string(w));
      Shape out = x;
      out.back() = w[0];
      return out;
    }
    default: return *in[0];
  }
}

void check_leaf(NodeId id, const Node& n, const Shape& s) {
  if (n.batched && (s.empty() || s[0] != n.directions))
    throw ShapeError(where(id, n) + ": leaf '" + n.name + "' bound with shape " + to_string(s) + ", expected " +
                     std::to_string(n.directions) + " leading directions");
}

}  // namespace

EvalResult evaluate(const Graph& graph, const Bindings& bindings) {
  EvalResult result;
  std::vector<Tensor> values(graph.size());
  for (std::size_t i = 0; i < graph.size(); ++i) {
    const NodeId id = static_cast<NodeId>(i);
    const Node& n = graph.nodes()[i];
    auto arg = [&](std::size_t k) -> const Tensor& { return values[static_cast<std::size_t>(n.inputs[k])]; };
    Tensor v;
    switch (n.op) {
      case Op::Leaf:
      case Op::Param: {
        auto it = bindings.find(n.name);
        if (it != bindings.end()) {
          v = it->second;
        } else if (auto p = graph.params().find(n.name); n.op == Op::Param && p != graph.params().end()) {
          v = p->second;
        } else {
          throw std::invalid_argument(where(id, n) + ": '" + n.name + "' is not bound");
        }
        if (n.op == Op::Leaf) check_leaf(id, n, v.shape());
        break;
      }
      case Op::Replicate: v = replicate(arg(0), n.count); break;
      case Op::Sum: v = sum_leading(arg(0)); break;
      case Op::Sin:
      case Op::Cos:
      case Op::Tanh:
      case Op::Exp:
      case Op::Neg: v = detail::apply_elementwise(elementwise_of(n.op), arg(0)); break;
      case Op::TanhDeriv: v = detail::apply_tanh_derivative(n.order, arg(0)); break;
      case Op::Add: v = add(arg(0), arg(1)); break;
      case Op::Scale: v = scale(arg(0), n.factor); break;
      case Op::Contract: {
        std::vector<const Tensor*> ops;
        for (std::size_t k = 0; k < n.inputs.size(); ++k) ops.push_back(&arg(k));
        std::vector<const Shape*> shapes;
        for (const Tensor* t : ops) shapes.push_back(&t->shape());
        infer_shape(id, n, shapes);  // validates direction counts
        v = batched_product(ops, n.spec.operands, n.factor, n.spec.reduces());
        break;
      }
      case Op::Linear: v = linear(arg(0), arg(1)); break;
      case Op::Affine: v = affine(arg(0), arg(1), arg(2)); break;
      case Op::Output:
        v = arg(0);
        result.outputs[n.name] = v;
        break;
    }
    std::vector<const Shape*> in;
    for (std::size_t k = 0; k < n.inputs.size(); ++k) in.push_back(&arg(k).shape());
    result.flops += node_flops(n, in, v.shape());
    values[i] = std::move(v);
  }
  return result;
}

ShapeInfo analyze(const Graph& graph, const std::map<std::string, Shape>& leaf_shapes) {
  ShapeInfo info;
  info.shapes.resize(graph.size());
  for (std::size_t i = 0; i < graph.size(); ++i) {
    const NodeId id = static_cast<NodeId>(i);
    const Node& n = graph.nodes()[i];
    std::vector<const Shape*> in;
    for (NodeId k : n.inputs) in.push_back(&info.shapes[static_cast<std::size_t>(k)]);
    Shape s;
    if (n.op == Op::Leaf || n.op == Op::Param) {
      if (auto it = leaf_shapes.find(n.name); it != leaf_shapes.end()) {
        s = it->second;
      } else if (auto p = graph.params().find(n.name); n.op == Op::Param && p != graph.params().end()) {
        s = p->second.shape();
      } else {
        throw std::invalid_argument(where(id, n) + ": no shape for '" + n.name + "'");
      }
      if (n.op == Op::Leaf) check_leaf(id, n, s);
    } else {
      s = infer_shape(id, n, in);
    }
    info.flops += node_flops(n, in, s);
    info.shapes[i] = std::move(s);
  }
  return info;
}

}  // namespace ctaylor::ir
