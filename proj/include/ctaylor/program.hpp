#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ctaylor/tensor.hpp"

namespace ctaylor {

enum class UnaryFn { Sin, Cos, Tanh, Exp };

std::string to_string(UnaryFn fn);

namespace prim {

// y = W x + b along the trailing axis, W of shape (out, in).
struct Affine {
  Tensor weight;
  Tensor bias;
};
struct Unary {
  UnaryFn fn;
};
struct Hadamard {};
struct Add {};
struct Scale {
  double factor;
};

}  // namespace prim

using Primitive = std::variant<prim::Affine, prim::Unary, prim::Hadamard, prim::Add, prim::Scale>;

int arity(const Primitive& p);
std::string name(const Primitive& p);

struct ProgramNode {
  std::optional<Primitive> op;  // empty for the input
  std::vector<int> inputs;
};

// A function R^D -> R^C built from primitives, one input, one output.
// Node ids are topologically ordered by construction.
class Program {
 public:
  int input();
  int affine(int x, Tensor weight, Tensor bias);
  int linear(int x, Tensor weight);
  int unary(UnaryFn fn, int x);
  int sin(int x) { return unary(UnaryFn::Sin, x); }
  int cos(int x) { return unary(UnaryFn::Cos, x); }
  int tanh(int x) { return unary(UnaryFn::Tanh, x); }
  int exp(int x) { return unary(UnaryFn::Exp, x); }
  int hadamard(int a, int b);
  int add(int a, int b);
  int scale(int x, double factor);

  void set_output(int id);

  std::size_t size() const { return nodes_.size(); }
  const ProgramNode& node(int id) const { return nodes_.at(static_cast<std::size_t>(id)); }
  const std::vector<ProgramNode>& nodes() const { return nodes_; }
  int input_id() const;
  int output_id() const;
  // Number of nodes that are not the input.
  std::size_t primitive_count() const;

 private:
  int push(std::optional<Primitive> op, std::vector<int> inputs);

  std::vector<ProgramNode> nodes_;
  std::optional<int> input_;
  std::optional<int> output_;
};

}  // namespace ctaylor
