#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ctaylor/tensor.hpp"

namespace ctaylor::ir {

using NodeId = int;

class BatchingError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what);
  int line() const { return line_; }

 private:
  int line_;
};

enum class Op {
  Leaf,
  Param,
  Replicate,
  Sum,  // sum over the direction axis
  Sin,
  Cos,
  Tanh,
  Exp,
  Neg,
  TanhDeriv,
  Add,
  Scale,
  Contract,
  Linear,  // (x, W)
  Affine,  // (x, W, b)
  Output,
};

std::string_view op_name(Op op);

// Elementwise product of operands that share a trailing shape. Each operand
// and the output are either "..." (unbatched) or "r..." (batched). A batched
// operand with an unbatched output sums over r.
struct ContractSpec {
  std::vector<bool> operands;
  bool output = false;

  std::string to_string() const;
  static ContractSpec parse(std::string_view text);
  bool reduces() const;
  bool operator==(const ContractSpec&) const = default;
};

// Which jet coefficient of which function-level node a value represents.
struct JetSlot {
  int node = 0;
  int degree = 0;
  int group = 0;
  auto operator<=>(const JetSlot&) const = default;
};

struct Node {
  Op op = Op::Leaf;
  std::vector<NodeId> inputs;
  std::string name;         // Leaf, Param, Output
  std::size_t count = 0;    // Replicate copies; direction count of a batched Leaf
  int order = 0;            // TanhDeriv
  double factor = 1.0;      // Scale factor, Contract coefficient
  ContractSpec spec;        // Contract
  bool batched = false;     // inferred, except for leaves
  std::size_t directions = 0;  // R of a batched value
  std::optional<JetSlot> slot;

  bool operator==(const Node&) const = default;
};

class Graph {
 public:
  NodeId leaf(std::string name);
  NodeId batched_leaf(std::string name, std::size_t directions);
  NodeId param(std::string name, Tensor value);
  NodeId replicate(NodeId x, std::size_t copies);
  NodeId sum(NodeId x);
  NodeId unary(Op op, NodeId x);
  NodeId tanh_derivative(int order, NodeId t);
  NodeId add(NodeId a, NodeId b);
  NodeId scale(double factor, NodeId x);
  // Operand batching is read off the inputs; reduce selects a "..." output
  // when some operand is batched.
  NodeId contract(double coef, std::vector<NodeId> operands, bool reduce);
  NodeId linear(NodeId x, NodeId weight);
  NodeId affine(NodeId x, NodeId weight, NodeId bias);
  NodeId output(std::string name, NodeId x);

  // Appends a node after checking its inputs and inferring its batching.
  // Throws BatchingError on incompatible edges.
  NodeId append(Node node);

  void set_slot(NodeId id, JetSlot slot);

  std::size_t size() const { return nodes_.size(); }
  const Node& node(NodeId id) const { return nodes_.at(static_cast<std::size_t>(id)); }
  const std::vector<Node>& nodes() const { return nodes_; }
  std::vector<NodeId> outputs() const;
  std::optional<NodeId> find_output(std::string_view name) const;
  std::optional<NodeId> find_leaf(std::string_view name) const;

  // Parameter values referenced by Param nodes; not part of the structure.
  std::map<std::string, Tensor>& params() { return params_; }
  const std::map<std::string, Tensor>& params() const { return params_; }

  // Structural equality; parameter values are ignored.
  bool operator==(const Graph& other) const { return nodes_ == other.nodes_; }

 private:
  std::vector<Node> nodes_;
  std::map<std::string, Tensor> params_;
};

// Drops nodes that no output depends on; leaves and params are kept.
Graph prune(const Graph& graph);

using Bindings = std::map<std::string, Tensor>;

struct EvalResult {
  std::map<std::string, Tensor> outputs;
  std::uint64_t flops = 0;
};

// Leaves are bound by name; params fall back to the graph's stored values.
EvalResult evaluate(const Graph& graph, const Bindings& bindings);

// Shapes of every node given the shapes of leaves (params use stored values
// unless overridden), and the flop count evaluation would report.
struct ShapeInfo {
  std::vector<Shape> shapes;
  std::uint64_t flops = 0;
};
ShapeInfo analyze(const Graph& graph, const std::map<std::string, Shape>& leaf_shapes);

std::string serialize(const Graph& graph);
Graph parse(std::string_view text);

}  // namespace ctaylor::ir
