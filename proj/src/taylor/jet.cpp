#include "ctaylor/jet.hpp"

#include <memory>

#include "elementwise.hpp"
#include "rules.hpp"

namespace ctaylor {

void Jet::validate() const {
  bool any_batched = false;
  for (int k = 1; k <= degree(); ++k) {
    const Tensor& c = coeff(k);
    if (c.rank() == primal.rank()) {
      if (c.shape() != primal.shape())
        throw ShapeError("jet coefficient " + std::to_string(k) + " has shape " + to_string(c.shape()) +
                         ", primal has " + to_string(primal.shape()));
    } else if (c.rank() == primal.rank() + 1) {
      if (c.trailing_shape() != primal.shape())
        throw ShapeError("batched jet coefficient " + std::to_string(k) + " has shape " + to_string(c.shape()) +
                         ", primal has " + to_string(primal.shape()));
      if (c.dim(0) != directions)
        throw MixedBatching("jet coefficient " + std::to_string(k) + " has " + std::to_string(c.dim(0)) +
                            " directions, jet declares " + std::to_string(directions));
      any_batched = true;
    } else {
      throw ShapeError("jet coefficient " + std::to_string(k) + " has rank " + std::to_string(c.rank()) +
                       ", primal rank is " + std::to_string(primal.rank()));
    }
  }
  if (!any_batched && directions != 0 && !collapsed_top)
    throw MixedBatching("jet declares directions but no coefficient is batched");
  if (collapsed_top) {
    if (degree() == 0) throw MixedBatching("collapsed jet needs a top coefficient");
    if (batched(degree())) throw MixedBatching("collapsed top coefficient must be unbatched");
    if (directions == 0) throw MixedBatching("collapsed jet must record its direction count");
  }
}

Jet directional_jet(const Tensor& x0, const Tensor& directions, int degree) {
  if (directions.rank() != x0.rank() + 1 || directions.trailing_shape() != x0.shape())
    throw ShapeError("directions " + to_string(directions.shape()) + " do not match primal " + to_string(x0.shape()));
  Jet jet{x0, {}, directions.dim(0), false};
  for (int k = 1; k <= degree; ++k) jet.coeffs.push_back(k == 1 ? directions : Tensor::zeros(directions.shape()));
  jet.validate();
  return jet;
}

Jet collapse_top(const Jet& jet) {
  jet.validate();
  if (jet.collapsed_top) return jet;
  if (!jet.batched(jet.degree())) throw MixedBatching("top coefficient is not batched");
  Jet out = jet;
  out.coeffs.back() = sum_leading(jet.coeffs.back());
  out.collapsed_top = true;
  return out;
}

namespace {

using detail::Elementwise;
using detail::JetValues;

class EagerBuilder {
 public:
  using Value = std::shared_ptr<const Tensor>;

  EagerBuilder(std::size_t primal_rank, std::size_t directions) : rank_(primal_rank), directions_(directions) {}

  static Value wrap(Tensor t) { return std::make_shared<const Tensor>(std::move(t)); }

  bool batched(const Value& v) const { return v->rank() == rank_ + 1; }

  Value elementwise(Elementwise op, const Value& x) { return wrap(detail::apply_elementwise(op, *x)); }
  Value tanh_derivative(int order, const Value& t) { return wrap(detail::apply_tanh_derivative(order, *t)); }

  Value contract(double coef, const std::vector<Value>& ops, bool reduce) {
    std::vector<const Tensor*> ptrs;
    std::vector<bool> flags;
    for (const Value& v : ops) {
      ptrs.push_back(v.get());
      flags.push_back(batched(v));
    }
    return wrap(batched_product(ptrs, flags, coef, reduce));
  }

  Value add(const Value& a, const Value& b) { return wrap(ctaylor::add(*a, *b)); }
  Value scale(double c, const Value& a) { return wrap(ctaylor::scale(*a, c)); }
  Value scale_by_directions(const Value& a) { return scale(static_cast<double>(directions_), a); }
  Value affine(const Value& x, const prim::Affine& op, int) { return wrap(ctaylor::affine(*x, op.weight, op.bias)); }
  Value linear(const Value& x, const prim::Affine& op, int) { return wrap(ctaylor::linear(*x, op.weight)); }
  void tag(const Value&, int, int, int) {}

 private:
  std::size_t rank_;
  std::size_t directions_;
};

JetValues<EagerBuilder::Value> to_values(const Jet& jet) {
  JetValues<EagerBuilder::Value> v{EagerBuilder::wrap(jet.primal), {}};
  for (const Tensor& c : jet.coeffs) v.coeffs.emplace_back(EagerBuilder::wrap(c));
  return v;
}

Jet to_jet(const JetValues<EagerBuilder::Value>& v, const Jet& like) {
  Jet out{*v.primal, {}, like.directions, like.collapsed_top};
  for (std::size_t k = 0; k < v.coeffs.size(); ++k) {
    if (v.coeffs[k]) {
      out.coeffs.push_back(**v.coeffs[k]);
    } else {
      Shape shape = v.primal->shape();
      if (like.batched(static_cast<int>(k) + 1)) shape.insert(shape.begin(), like.directions);
      out.coeffs.push_back(Tensor::zeros(shape));
    }
  }
  return out;
}

void check_compatible(std::span<const Jet> inputs) {
  for (const Jet& j : inputs) j.validate();
  for (const Jet& j : inputs.subspan(1)) {
    if (j.degree() != inputs[0].degree())
      throw MixedBatching("input jets have degrees " + std::to_string(inputs[0].degree()) + " and " +
                          std::to_string(j.degree()));
    if (j.collapsed_top != inputs[0].collapsed_top)
      throw MixedBatching("collapsed and uncollapsed input jets are mixed");
    if (j.directions != inputs[0].directions && j.directions != 0 && inputs[0].directions != 0)
      throw MixedBatching("input jets have " + std::to_string(inputs[0].directions) + " and " +
                          std::to_string(j.directions) + " directions");
    if (j.primal.rank() != inputs[0].primal.rank()) throw ShapeError("input jets have different primal ranks");
  }
}

}  // namespace

Jet propagate_primitive(const Primitive& op, std::span<const Jet> inputs) {
  if (static_cast<int>(inputs.size()) != arity(op))
    throw std::invalid_argument(name(op) + " expects " + std::to_string(arity(op)) + " input jets, got " +
                                std::to_string(inputs.size()));
  check_compatible(inputs);
  const Jet& first = inputs[0];
  std::size_t directions = 0;
  for (const Jet& j : inputs) directions = std::max(directions, j.directions);
  EagerBuilder builder(first.primal.rank(), directions);
  std::vector<JetValues<EagerBuilder::Value>> values;
  for (const Jet& j : inputs) values.push_back(to_values(j));
  std::vector<const JetValues<EagerBuilder::Value>*> ptrs;
  for (const auto& v : values) ptrs.push_back(&v);
  detail::RuleContext ctx{first.degree(), first.collapsed_top, 0, 0};
  Jet like = first;
  like.directions = directions;
  Jet out = to_jet(detail::apply_rule(builder, op, ptrs, ctx), like);
  out.validate();
  return out;
}

Jet jet_eval(const Program& program, const Jet& seed) {
  seed.validate();
  EagerBuilder builder(seed.primal.rank(), seed.directions);
  std::vector<std::optional<JetValues<EagerBuilder::Value>>> values(program.size());
  values[static_cast<std::size_t>(program.input_id())] = to_values(seed);
  detail::RuleContext ctx{seed.degree(), seed.collapsed_top, 0, 0};
  for (std::size_t id = 0; id < program.size(); ++id) {
    const ProgramNode& node = program.node(static_cast<int>(id));
    if (!node.op) continue;
    std::vector<const JetValues<EagerBuilder::Value>*> ptrs;
    for (int i : node.inputs) ptrs.push_back(&*values[static_cast<std::size_t>(i)]);
    ctx.node = static_cast<int>(id);
    values[id] = detail::apply_rule(builder, *node.op, ptrs, ctx);
  }
  Jet out = to_jet(*values[static_cast<std::size_t>(program.output_id())], seed);
  out.validate();
  return out;
}

}  // namespace ctaylor
