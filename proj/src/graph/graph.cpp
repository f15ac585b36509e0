#include "ctaylor/graph.hpp"

#include <algorithm>

namespace ctaylor::ir {

ParseError::ParseError(int line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

std::string_view op_name(Op op) {
  switch (op) {
    case Op::Leaf: return "leaf";
    case Op::Param: return "param";
    case Op::Replicate: return "replicate";
    case Op::Sum: return "sum";
    case Op::Sin: return "sin";
    case Op::Cos: return "cos";
    case Op::Tanh: return "tanh";
    case Op::Exp: return "exp";
    case Op::Neg: return "neg";
    case Op::TanhDeriv: return "tanh_deriv";
    case Op::Add: return "add";
    case Op::Scale: return "scale";
    case Op::Contract: return "contract";
    case Op::Linear: return "linear";
    case Op::Affine: return "affine";
    case Op::Output: return "output";
  }
  return "?";
}

std::string ContractSpec::to_string() const {
  std::string s;
  for (std::size_t i = 0; i < operands.size(); ++i) {
    if (i) s += ',';
    s += operands[i] ? "r..." : "...";
  }
  s += "->";
  s += output ? "r..." : "...";
  return s;
}

ContractSpec ContractSpec::parse(std::string_view text) {
  auto term = [&](std::string_view t) {
    if (t == "...") return false;
    if (t == "r...") return true;
    throw std::invalid_argument("bad contraction term '" + std::string(t) + "'");
  };
  auto arrow = text.find("->");
  if (arrow == std::string_view::npos) throw std::invalid_argument("contraction spec lacks '->'");
  ContractSpec spec;
  std::string_view lhs = text.substr(0, arrow);
  while (true) {
    auto comma = lhs.find(',');
    spec.operands.push_back(term(lhs.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    lhs.remove_prefix(comma + 1);
  }
  spec.output = term(text.substr(arrow + 2));
  return spec;
}

bool ContractSpec::reduces() const {
  return !output && std::find(operands.begin(), operands.end(), true) != operands.end();
}

namespace {

bool is_unary(Op op) {
  switch (op) {
    case Op::Sin:
    case Op::Cos:
    case Op::Tanh:
    case Op::Exp:
    case Op::Neg:
    case Op::TanhDeriv:
    case Op::Scale:
    case Op::Sum:
    case Op::Replicate:
    case Op::Output: return true;
    default: return false;
  }
}

}  // namespace

NodeId Graph::append(Node n) {
  const std::string what(op_name(n.op));
  std::vector<const Node*> in;
  for (NodeId id : n.inputs) {
    if (id < 0 || static_cast<std::size_t>(id) >= nodes_.size())
      throw BatchingError(what + ": input %" + std::to_string(id) + " does not exist");
    if (nodes_[static_cast<std::size_t>(id)].op == Op::Output)
      throw BatchingError(what + ": output node %" + std::to_string(id) + " cannot feed another node");
    in.push_back(&nodes_[static_cast<std::size_t>(id)]);
  }
  auto expect_arity = [&](std::size_t k) {
    if (in.size() != k)
      throw BatchingError(what + " expects " + std::to_string(k) + " inputs, got " + std::to_string(in.size()));
  };
  auto require_unbatched = [&](std::size_t i) {
    if (in[i]->batched) throw BatchingError(what + ": input " + std::to_string(i) + " must be unbatched");
  };
  // Batching of a node fed by a set of values, checking direction counts.
  auto join = [&](const std::vector<const Node*>& values) {
    std::optional<std::size_t> r;
    for (const Node* v : values) {
      if (!v->batched) continue;
      if (r && *r != v->directions)
        throw BatchingError(what + ": batched inputs have " + std::to_string(*r) + " and " +
                            std::to_string(v->directions) + " directions");
      r = v->directions;
    }
    n.batched = r.has_value();
    n.directions = r.value_or(0);
  };

  if (is_unary(n.op)) expect_arity(1);
  switch (n.op) {
    case Op::Leaf:
      expect_arity(0);
      n.directions = n.batched ? n.count : 0;
      if (!n.batched) n.count = 0;
      break;
    case Op::Param:
      expect_arity(0);
      n.batched = false;
      n.directions = 0;
      break;
    case Op::Replicate:
      require_unbatched(0);
      n.batched = true;
      n.directions = n.count;
      break;
    case Op::Sum:
      if (!in[0]->batched) throw BatchingError("sum: input must be batched");
      n.batched = false;
      n.directions = 0;
      break;
    case Op::Add:
      expect_arity(2);
      join(in);
      break;
    case Op::Contract: {
      if (in.empty()) throw BatchingError("contract needs at least one operand");
      if (n.spec.operands.size() != in.size())
        throw BatchingError("contract spec " + n.spec.to_string() + " lists " + std::to_string(n.spec.operands.size()) +
                            " operands, node has " + std::to_string(in.size()));
      for (std::size_t i = 0; i < in.size(); ++i) {
        if (n.spec.operands[i] != in[i]->batched)
          throw BatchingError("contract spec " + n.spec.to_string() + ": operand " + std::to_string(i) + " is " +
                              (in[i]->batched ? "batched" : "unbatched"));
      }
      join(in);
      if (n.spec.output && !n.batched) throw BatchingError("contract spec " + n.spec.to_string() + " has no batched operand");
      n.batched = n.spec.output;
      if (!n.batched) n.directions = 0;
      break;
    }
    case Op::Linear:
      expect_arity(2);
      require_unbatched(1);
      join(in);
      break;
    case Op::Affine:
      expect_arity(3);
      require_unbatched(1);
      require_unbatched(2);
      join(in);
      break;
    default:  // elementwise, scale, output
      join(in);
      break;
  }
  nodes_.push_back(std::move(n));
  return static_cast<NodeId>(nodes_.size() - 1);
}

NodeId Graph::leaf(std::string name) {
  Node n;
  n.op = Op::Leaf;
  n.name = std::move(name);
  return append(std::move(n));
}

NodeId Graph::batched_leaf(std::string name, std::size_t directions) {
  Node n;
  n.op = Op::Leaf;
  n.name = std::move(name);
  n.batched = true;
  n.count = directions;
  return append(std::move(n));
}

NodeId Graph::param(std::string name, Tensor value) {
  Node n;
  n.op = Op::Param;
  n.name = name;
  params_[std::move(name)] = std::move(value);
  return append(std::move(n));
}

NodeId Graph::replicate(NodeId x, std::size_t copies) {
  Node n;
  n.op = Op::Replicate;
  n.inputs = {x};
  n.count = copies;
  return append(std::move(n));
}

NodeId Graph::sum(NodeId x) {
  Node n;
  n.op = Op::Sum;
  n.inputs = {x};
  return append(std::move(n));
}

NodeId Graph::unary(Op op, NodeId x) {
  if (op != Op::Sin && op != Op::Cos && op != Op::Tanh && op != Op::Exp && op != Op::Neg)
    throw std::invalid_argument(std::string(op_name(op)) + " is not an elementwise function");
  Node n;
  n.op = op;
  n.inputs = {x};
  return append(std::move(n));
}

NodeId Graph::tanh_derivative(int order, NodeId t) {
  Node n;
  n.op = Op::TanhDeriv;
  n.inputs = {t};
  n.order = order;
  return append(std::move(n));
}

NodeId Graph::add(NodeId a, NodeId b) {
  Node n;
  n.op = Op::Add;
  n.inputs = {a, b};
  return append(std::move(n));
}

NodeId Graph::scale(double factor, NodeId x) {
  Node n;
  n.op = Op::Scale;
  n.inputs = {x};
  n.factor = factor;
  return append(std::move(n));
}

NodeId Graph::contract(double coef, std::vector<NodeId> operands, bool reduce) {
  Node n;
  n.op = Op::Contract;
  n.factor = coef;
  bool any = false;
  for (NodeId id : operands) {
    bool b = node(id).batched;
    n.spec.operands.push_back(b);
    any = any || b;
  }
  if (reduce && !any) throw BatchingError("contract: nothing to reduce, no operand is batched");
  n.spec.output = any && !reduce;
  n.inputs = std::move(operands);
  return append(std::move(n));
}

NodeId Graph::linear(NodeId x, NodeId weight) {
  Node n;
  n.op = Op::Linear;
  n.inputs = {x, weight};
  return append(std::move(n));
}

NodeId Graph::affine(NodeId x, NodeId weight, NodeId bias) {
  Node n;
  n.op = Op::Affine;
  n.inputs = {x, weight, bias};
  return append(std::move(n));
}

NodeId Graph::output(std::string name, NodeId x) {
  Node n;
  n.op = Op::Output;
  n.name = std::move(name);
  n.inputs = {x};
  return append(std::move(n));
}

void Graph::set_slot(NodeId id, JetSlot slot) { nodes_.at(static_cast<std::size_t>(id)).slot = slot; }

std::vector<NodeId> Graph::outputs() const {
  std::vector<NodeId> out;
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    if (nodes_[i].op == Op::Output) out.push_back(static_cast<NodeId>(i));
  return out;
}

std::optional<NodeId> Graph::find_output(std::string_view name) const {
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    if (nodes_[i].op == Op::Output && nodes_[i].name == name) return static_cast<NodeId>(i);
  return std::nullopt;
}

std::optional<NodeId> Graph::find_leaf(std::string_view name) const {
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    if (nodes_[i].op == Op::Leaf && nodes_[i].name == name) return static_cast<NodeId>(i);
  return std::nullopt;
}

Graph prune(const Graph& graph) {
  const std::size_t n = graph.size();
  std::vector<bool> live(n, false);
  for (std::size_t i = n; i-- > 0;) {
    const Node& node = graph.nodes()[i];
    if (node.op == Op::Output || node.op == Op::Leaf || node.op == Op::Param) live[i] = true;
    if (live[i])
      for (NodeId in : node.inputs) live[static_cast<std::size_t>(in)] = true;
  }
  Graph out;
  out.params() = graph.params();
  std::vector<NodeId> remap(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    if (!live[i]) continue;
    Node node = graph.nodes()[i];
    for (NodeId& in : node.inputs) in = remap[static_cast<std::size_t>(in)];
    remap[i] = out.append(std::move(node));
  }
  return out;
}

}  // namespace ctaylor::ir
