#include "ctaylor/operators.hpp"

#include "ctaylor/capture.hpp"
#include "ctaylor/interpolation.hpp"
#include "ctaylor/jet.hpp"
#include "ctaylor/partitions.hpp"

namespace ctaylor {

std::string to_string(Mode mode) { return mode == Mode::Standard ? "standard" : "collapsed"; }

namespace {

// (R, D) directions spread over the batch axes of x0: (R, ..., D).
Tensor broadcast_directions(const Tensor& vectors, const Tensor& x0) {
  const std::size_t R = vectors.dim(0);
  const std::size_t D = vectors.dim(1);
  if (x0.rank() == 0 || x0.shape().back() != D)
    throw ShapeError("input " + to_string(x0.shape()) + " does not end in dimension " + std::to_string(D));
  const std::size_t batch = x0.numel() / D;
  Shape shape{R};
  shape.insert(shape.end(), x0.shape().begin(), x0.shape().end());
  Tensor out = Tensor::zeros(shape);
  for (std::size_t r = 0; r < R; ++r)
    for (std::size_t n = 0; n < batch; ++n)
      for (std::size_t d = 0; d < D; ++d) out[(r * batch + n) * D + d] = vectors[r * D + d];
  return out;
}

std::string group_prefix(std::size_t g, std::size_t count) { return count == 1 ? "" : "g" + std::to_string(g) + "."; }

}  // namespace

CompiledOperator::CompiledOperator(const Program& program, int degree, std::vector<WeightedDirections> groups,
                                   Mode mode)
    : degree_(degree), mode_(mode), groups_(std::move(groups)) {
  if (groups_.empty()) throw std::invalid_argument("operator needs at least one direction group");
  dim_ = groups_[0].vectors.dim(1);
  SeedLayout layout{degree, {}};
  for (std::size_t g = 0; g < groups_.size(); ++g) {
    const Tensor& v = groups_[g].vectors;
    if (v.rank() != 2 || v.dim(1) != dim_) throw ShapeError("direction groups disagree on the input dimension");
    std::vector<bool> seeded(static_cast<std::size_t>(degree), false);
    seeded[0] = true;
    layout.groups.push_back({group_prefix(g, groups_.size()), v.dim(0), seeded});
  }
  captured_ = capture(program, layout);
  if (mode == Mode::Collapsed) {
    CollapseResult c = collapse(captured_);
    graph_ = std::move(c.graph);
    report_ = c.report;
  } else {
    report_.nodes_before = captured_.size();
    report_.batched_vectors_before = ctaylor::vectors_per_node(captured_);
    graph_ = push_replicate_down(captured_, &report_);
    report_.nodes_after = graph_.size();
    report_.batched_vectors_after = ctaylor::vectors_per_node(graph_);
  }
}

ir::Bindings CompiledOperator::bindings(const Tensor& x0) const {
  ir::Bindings b;
  b["x0"] = x0;
  for (std::size_t g = 0; g < groups_.size(); ++g)
    b[group_prefix(g, groups_.size()) + "x1_r"] = broadcast_directions(groups_[g].vectors, x0);
  return b;
}

CompiledOperator::Run CompiledOperator::run(const Tensor& x0) const {
  ir::EvalResult r = ir::evaluate(graph_, bindings(x0));
  Run out;
  out.flops = r.flops;
  for (std::size_t g = 0; g < groups_.size(); ++g) {
    const Tensor& top = r.outputs.at(group_prefix(g, groups_.size()) + "f" + std::to_string(degree_));
    Tensor term = scale(top, groups_[g].weight);
    out.value = g == 0 ? term : add(out.value, term);
  }
  return out;
}

std::uint64_t CompiledOperator::static_flops(std::size_t batch) const {
  std::map<std::string, Shape> shapes;
  shapes["x0"] = {batch, dim_};
  for (std::size_t g = 0; g < groups_.size(); ++g)
    shapes[group_prefix(g, groups_.size()) + "x1_r"] = {groups_[g].vectors.dim(0), batch, dim_};
  return ir::analyze(graph_, shapes).flops;
}

CompiledOperator compile_laplacian(const Program& program, const DirectionSet& directions, Mode mode) {
  return CompiledOperator(program, 2, {{directions.vectors, directions.factor}}, mode);
}

CompiledOperator compile_biharmonic_exact(const Program& program, std::size_t dim, Mode mode) {
  if (dim < 1) throw std::invalid_argument("biharmonic needs dimension >= 1");
  static const InterpolationPlan plan = InterpolationPlan::make({2, 2});
  const double kfact = static_cast<double>(factorial(plan.degree));
  std::vector<WeightedDirections> groups;
  for (DirectionClass& c : reduce_on_basis(plan, dim)) groups.push_back({std::move(c.directions), c.weight.value() / kfact});
  // Off-diagonal classes are empty for D = 1 but stay in the graph so the
  // vector count keeps its closed form.
  if (dim == 1) {
    groups.push_back({Tensor::zeros({0, 1}), 2.0 * gamma({2, 2}, {3, 1}).value() / kfact});
    groups.push_back({Tensor::zeros({0, 1}), 2.0 * gamma({2, 2}, {2, 2}).value() / kfact});
  }
  return CompiledOperator(program, 4, std::move(groups), mode);
}

CompiledOperator compile_biharmonic_stochastic(const Program& program, std::size_t dim, std::size_t samples,
                                               std::uint64_t seed, Mode mode) {
  if (samples == 0) throw std::invalid_argument("need at least one sample");
  // E[<d^4 f, v^4>] = 3 * biharmonic for standard normal v.
  Tensor v = sample_directions(Distribution::Gaussian, samples, dim, seed);
  return CompiledOperator(program, 4, {{std::move(v), 1.0 / (3.0 * static_cast<double>(samples))}}, mode);
}

Tensor laplacian(const Program& program, const Tensor& x0, Mode mode, const DirectionSet& directions) {
  return compile_laplacian(program, directions, mode)(x0);
}

Tensor weighted_laplacian(const Program& program, const Tensor& x0, const Tensor& sigma, Mode mode) {
  if (sigma.rank() != 2 || x0.rank() == 0 || sigma.dim(0) != x0.shape().back())
    throw ShapeError("sigma " + to_string(sigma.shape()) + " does not match input " + to_string(x0.shape()));
  return laplacian(program, x0, mode, DirectionSet::columns(sigma));
}

Tensor weighted_laplacian_stochastic(const Program& program, const Tensor& x0, const Tensor& sigma,
                                     std::size_t samples, std::uint64_t seed, Distribution dist, Mode mode) {
  if (sigma.rank() != 2 || x0.rank() == 0 || sigma.dim(0) != x0.shape().back())
    throw ShapeError("sigma " + to_string(sigma.shape()) + " does not match input " + to_string(x0.shape()));
  return laplacian(program, x0, mode, DirectionSet::sampled_through(sigma, dist, samples, seed));
}

Tensor biharmonic_exact(const Program& program, const Tensor& x0, Mode mode) {
  if (x0.rank() == 0) throw ShapeError("input must have a feature axis");
  return compile_biharmonic_exact(program, x0.shape().back(), mode)(x0);
}

Tensor biharmonic_stochastic(const Program& program, const Tensor& x0, std::size_t samples, std::uint64_t seed,
                             Mode mode) {
  if (x0.rank() == 0) throw ShapeError("input must have a feature axis");
  return compile_biharmonic_stochastic(program, x0.shape().back(), samples, seed, mode)(x0);
}

Tensor biharmonic_6jet(const Program& program, const Tensor& x0) {
  if (x0.rank() == 0) throw ShapeError("input must have a feature axis");
  const std::size_t D = x0.shape().back();
  const std::size_t pairs = D * D;
  Tensor first = Tensor::zeros({pairs, D});
  Tensor second = Tensor::zeros({pairs, D});
  for (std::size_t a = 0; a < D; ++a)
    for (std::size_t b = 0; b < D; ++b) {
      first.at({a * D + b, a}) = 1.0;
      second.at({a * D + b, b}) = 1.0;
    }
  const Tensor x1 = broadcast_directions(first, x0);
  const Tensor x2 = broadcast_directions(second, x0);
  auto sixth = [&](double sign) {
    Jet seed{x0, {}, pairs, false};
    seed.coeffs.push_back(x1);
    seed.coeffs.push_back(scale(x2, sign));
    for (int k = 3; k <= 6; ++k) seed.coeffs.push_back(Tensor::zeros(x1.shape()));
    return sum_leading(jet_eval(program, seed).coeff(6));
  };
  Tensor plus = sixth(1.0);
  Tensor minus = sixth(-1.0);
  Tensor zero = sixth(0.0);
  return scale(sub(add(plus, minus), scale(zero, 2.0)), 1.0 / 90.0);
}

}  // namespace ctaylor
