#include "ctaylor/capture.hpp"

#include <map>
#include <stdexcept>

#include "taylor/rules.hpp"

namespace ctaylor {

SeedLayout SeedLayout::directional(int degree, std::size_t directions) {
  std::vector<bool> seeded(static_cast<std::size_t>(degree), false);
  if (degree > 0) seeded[0] = true;
  return {degree, {{"", directions, seeded}}};
}

SeedLayout SeedLayout::full(int degree, std::size_t directions) {
  return {degree, {{"", directions, std::vector<bool>(static_cast<std::size_t>(degree), true)}}};
}

namespace {

using detail::Elementwise;
using ir::NodeId;

class GraphBuilder {
 public:
  using Value = NodeId;

  explicit GraphBuilder(ir::Graph& g) : g_(g) {}

  void set_directions(std::size_t r) { directions_ = r; }

  bool batched(Value v) const { return g_.node(v).batched; }

  Value elementwise(Elementwise op, Value x) {
    switch (op) {
      case Elementwise::Sin: return g_.unary(ir::Op::Sin, x);
      case Elementwise::Cos: return g_.unary(ir::Op::Cos, x);
      case Elementwise::Tanh: return g_.unary(ir::Op::Tanh, x);
      case Elementwise::Exp: return g_.unary(ir::Op::Exp, x);
      case Elementwise::Neg: return g_.unary(ir::Op::Neg, x);
    }
    throw std::logic_error("unknown elementwise op");
  }
  Value tanh_derivative(int order, Value t) { return g_.tanh_derivative(order, t); }
  Value contract(double coef, const std::vector<Value>& ops, bool reduce) { return g_.contract(coef, ops, reduce); }
  Value add(Value a, Value b) { return g_.add(a, b); }
  Value scale(double c, Value a) { return g_.scale(c, a); }
  Value scale_by_directions(Value a) { return g_.scale(static_cast<double>(directions_), a); }

  Value affine(Value x, const prim::Affine& op, int node) {
    auto [w, b] = params(op, node);
    return g_.affine(x, w, b);
  }
  Value linear(Value x, const prim::Affine& op, int node) { return g_.linear(x, params(op, node).first); }

  void tag(Value v, int node, int degree, int group) {
    const ir::Node& n = g_.node(v);
    if (!n.slot && n.op != ir::Op::Leaf && n.op != ir::Op::Replicate) g_.set_slot(v, {node, degree, group});
  }

 private:
  std::pair<NodeId, NodeId> params(const prim::Affine& op, int node) {
    auto it = params_.find(node);
    if (it != params_.end()) return it->second;
    NodeId w = g_.param("W" + std::to_string(node), op.weight);
    NodeId b = g_.param("b" + std::to_string(node), op.bias);
    return params_[node] = {w, b};
  }

  ir::Graph& g_;
  std::size_t directions_ = 0;
  std::map<int, std::pair<NodeId, NodeId>> params_;
};

}  // namespace

ir::Graph capture(const Program& program, const SeedLayout& layout) {
  const int K = layout.degree;
  if (K < 1 || K > kMaxDegree) throw std::out_of_range("capture degree " + std::to_string(K) + " unsupported");
  if (layout.groups.empty()) throw std::invalid_argument("capture needs at least one direction group");

  ir::Graph g;
  GraphBuilder b(g);
  const int input = program.input_id();
  NodeId x0 = g.leaf("x0");
  g.set_slot(x0, {input, 0, 0});

  // Leaves first so every group's inputs precede its computation.
  std::vector<std::vector<std::optional<NodeId>>> seeds;
  for (std::size_t gi = 0; gi < layout.groups.size(); ++gi) {
    const SeedGroup& group = layout.groups[gi];
    if (group.seeded.size() != static_cast<std::size_t>(K))
      throw std::invalid_argument("seed group '" + group.prefix + "' lists " + std::to_string(group.seeded.size()) +
                                  " coefficients for degree " + std::to_string(K));
    std::vector<std::optional<NodeId>> leaves;
    for (int k = 1; k <= K; ++k) {
      if (!group.seeded[static_cast<std::size_t>(k - 1)]) {
        leaves.push_back(std::nullopt);
        continue;
      }
      NodeId leaf = g.batched_leaf(group.prefix + "x" + std::to_string(k) + "_r", group.directions);
      g.set_slot(leaf, {input, k, static_cast<int>(gi)});
      leaves.push_back(leaf);
    }
    seeds.push_back(std::move(leaves));
  }

  for (std::size_t gi = 0; gi < layout.groups.size(); ++gi) {
    const SeedGroup& group = layout.groups[gi];
    b.set_directions(group.directions);
    std::vector<std::optional<detail::JetValues<NodeId>>> values(program.size());
    values[static_cast<std::size_t>(input)] = detail::JetValues<NodeId>{g.replicate(x0, group.directions), seeds[gi]};
    detail::RuleContext ctx{K, false, 0, static_cast<int>(gi)};
    for (std::size_t id = 0; id < program.size(); ++id) {
      const ProgramNode& node = program.node(static_cast<int>(id));
      if (!node.op) continue;
      std::vector<const detail::JetValues<NodeId>*> ptrs;
      for (int i : node.inputs) ptrs.push_back(&*values[static_cast<std::size_t>(i)]);
      ctx.node = static_cast<int>(id);
      values[id] = detail::apply_rule(b, *node.op, ptrs, ctx);
    }
    const detail::JetValues<NodeId>& out = *values[static_cast<std::size_t>(program.output_id())];
    g.output(group.prefix + "f0_r", out.primal);
    for (int k = 1; k < K; ++k)
      if (out.coeff(k)) g.output(group.prefix + "f" + std::to_string(k) + "_r", *out.coeff(k));
    // A structurally zero top coefficient (e.g. an affine program) still
    // needs an output of the right shape.
    NodeId top = out.coeff(K) ? *out.coeff(K) : g.scale(0.0, out.primal);
    NodeId total = g.sum(top);
    g.output(group.prefix + "f" + std::to_string(K), total);
  }
  return g;
}

}  // namespace ctaylor
