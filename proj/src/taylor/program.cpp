#include "ctaylor/program.hpp"

#include <stdexcept>

namespace ctaylor {

std::string to_string(UnaryFn fn) {
  switch (fn) {
    case UnaryFn::Sin: return "sin";
    case UnaryFn::Cos: return "cos";
    case UnaryFn::Tanh: return "tanh";
    case UnaryFn::Exp: return "exp";
  }
  return "?";
}

int arity(const Primitive& p) {
  return std::holds_alternative<prim::Hadamard>(p) || std::holds_alternative<prim::Add>(p) ? 2 : 1;
}

std::string name(const Primitive& p) {
  struct {
    std::string operator()(const prim::Affine&) const { return "affine"; }
    std::string operator()(const prim::Unary& u) const { return to_string(u.fn); }
    std::string operator()(const prim::Hadamard&) const { return "hadamard"; }
    std::string operator()(const prim::Add&) const { return "add"; }
    std::string operator()(const prim::Scale&) const { return "scale"; }
  } visitor;
  return std::visit(visitor, p);
}

int Program::push(std::optional<Primitive> op, std::vector<int> inputs) {
  for (int i : inputs) {
    if (i < 0 || static_cast<std::size_t>(i) >= nodes_.size())
      throw std::invalid_argument("program: input id " + std::to_string(i) + " does not exist");
  }
  nodes_.push_back({std::move(op), std::move(inputs)});
  return static_cast<int>(nodes_.size() - 1);
}

int Program::input() {
  if (input_) throw std::invalid_argument("program: only one input is supported");
  input_ = push(std::nullopt, {});
  return *input_;
}

int Program::affine(int x, Tensor weight, Tensor bias) {
  if (weight.rank() != 2 || bias.rank() != 1 || bias.dim(0) != weight.dim(0)) {
    throw ShapeError("affine: weight " + to_string(weight.shape()) + " and bias " + to_string(bias.shape()) +
                     " are inconsistent");
  }
  return push(prim::Affine{std::move(weight), std::move(bias)}, {x});
}

int Program::linear(int x, Tensor weight) {
  std::size_t out = weight.rank() == 2 ? weight.dim(0) : 0;
  return affine(x, std::move(weight), Tensor::zeros({out}));
}

int Program::unary(UnaryFn fn, int x) { return push(prim::Unary{fn}, {x}); }
int Program::hadamard(int a, int b) { return push(prim::Hadamard{}, {a, b}); }
int Program::add(int a, int b) { return push(prim::Add{}, {a, b}); }
int Program::scale(int x, double factor) { return push(prim::Scale{factor}, {x}); }

void Program::set_output(int id) {
  if (id < 0 || static_cast<std::size_t>(id) >= nodes_.size())
    throw std::invalid_argument("program: output id " + std::to_string(id) + " does not exist");
  output_ = id;
}

int Program::input_id() const {
  if (!input_) throw std::invalid_argument("program has no input");
  return *input_;
}

int Program::output_id() const {
  if (output_) return *output_;
  if (nodes_.empty()) throw std::invalid_argument("program is empty");
  return static_cast<int>(nodes_.size() - 1);
}

std::size_t Program::primitive_count() const { return input_ ? nodes_.size() - 1 : nodes_.size(); }

}  // namespace ctaylor
