#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ctaylor/collapse.hpp"
#include "ctaylor/graph.hpp"
#include "ctaylor/program.hpp"
#include "ctaylor/random.hpp"
#include "ctaylor/tensor.hpp"

namespace ctaylor {

enum class Mode { Standard, Collapsed };

std::string to_string(Mode mode);

// A set of directions v_r (rows of a (count, D) matrix) and the factor that
// turns the sum of second-order terms into the operator value (1 for exact
// sums, 1/S for Monte-Carlo averages).
struct DirectionSet {
  Tensor vectors;
  double factor = 1.0;

  std::size_t size() const { return vectors.dim(0); }
  std::size_t dim() const { return vectors.dim(1); }

  static DirectionSet basis(std::size_t dim);
  // Columns of sigma (D, R).
  static DirectionSet columns(const Tensor& sigma);
  static DirectionSet sampled(Distribution dist, std::size_t samples, std::size_t dim, std::uint64_t seed);
  // sigma v_s with v_s drawn in R^R.
  static DirectionSet sampled_through(const Tensor& sigma, Distribution dist, std::size_t samples, std::uint64_t seed);
};

// Factor sigma (D, R) with sigma sigma^T = weighting for a symmetric positive
// semi-definite weighting; indefinite matrices are rejected.
Tensor factor_weighting(const Tensor& weighting, double tol = 1e-12);

struct WeightedDirections {
  Tensor vectors;  // (R, D)
  double weight;   // applied to the sum over this group's top coefficients
};

// A linear differential operator evaluated as weighted sums of K-th order
// directional derivatives, captured once and rewritten for the chosen mode.
class CompiledOperator {
 public:
  CompiledOperator(const Program& program, int degree, std::vector<WeightedDirections> groups, Mode mode);

  // x0 of shape (D) or (N, D); returns (C) or (N, C).
  Tensor operator()(const Tensor& x0) const { return run(x0).value; }

  struct Run {
    Tensor value;
    std::uint64_t flops = 0;
  };
  Run run(const Tensor& x0) const;

  // Flop proxy for a batch of N inputs without evaluating.
  std::uint64_t static_flops(std::size_t batch) const;

  const ir::Graph& graph() const { return graph_; }
  const ir::Graph& captured() const { return captured_; }
  const RewriteReport& report() const { return report_; }
  std::size_t vectors_per_node() const { return ctaylor::vectors_per_node(graph_); }
  Mode mode() const { return mode_; }
  int degree() const { return degree_; }

 private:
  ir::Bindings bindings(const Tensor& x0) const;

  int degree_;
  Mode mode_;
  std::size_t dim_;
  std::vector<WeightedDirections> groups_;
  ir::Graph captured_;
  ir::Graph graph_;
  RewriteReport report_;
};

CompiledOperator compile_laplacian(const Program& program, const DirectionSet& directions, Mode mode);
CompiledOperator compile_biharmonic_exact(const Program& program, std::size_t dim, Mode mode);
CompiledOperator compile_biharmonic_stochastic(const Program& program, std::size_t dim, std::size_t samples,
                                               std::uint64_t seed, Mode mode);

// Sum over directions of <d^2 f(x0), v (x) v>, times the set's factor.
Tensor laplacian(const Program& program, const Tensor& x0, Mode mode, const DirectionSet& directions);
// Tr(sigma sigma^T d^2 f(x0)) using the columns of sigma (D, R).
Tensor weighted_laplacian(const Program& program, const Tensor& x0, const Tensor& sigma, Mode mode);
Tensor weighted_laplacian_stochastic(const Program& program, const Tensor& x0, const Tensor& sigma,
                                     std::size_t samples, std::uint64_t seed, Distribution dist, Mode mode);
Tensor biharmonic_exact(const Program& program, const Tensor& x0, Mode mode);
// (1/(3S)) sum_s <d^4 f(x0), v_s^{(x)4}> with standard normal v_s.
Tensor biharmonic_stochastic(const Program& program, const Tensor& x0, std::size_t samples, std::uint64_t seed,
                             Mode mode);
// Reference method from 6-jets: for every (d1, d2) three jets seeded with
// x1 = e_d1 and x2 = +e_d2, -e_d2, 0; (f6+ + f6- - 2 f6^0) / 90 is the mixed
// fourth derivative. x0 has shape (D).
Tensor biharmonic_6jet(const Program& program, const Tensor& x0);

}  // namespace ctaylor
