#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ctaylor/program.hpp"
#include "ctaylor/tensor.hpp"

namespace ctaylor {

struct Fraction {
  std::int64_t num = 0;
  std::int64_t den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  bool operator==(const Fraction&) const = default;
  std::string to_string() const;
};

// gamma_{i,j} = sum_{0 < m <= i} (-1)^{|i-m|} C(i,m) C(|i| m / |m|, j) (|m|/|i|)^{|i|}
// with vector binomials taken componentwise and generalized binomials for
// rational upper arguments. Computed exactly.
Fraction gamma(const std::vector<int>& i, const std::vector<int>& j);

struct PlanMember {
  std::vector<int> j;
  Fraction gamma;
};

// Weighted sum of K-th directional derivatives along sum_l j_l v_l that
// reproduces <d^K f, v_1^{i_1} (x) ... (x) v_I^{i_I}> for every |j| = K:
//   <d^K f, (x)_l v_l^{i_l}> = sum_j gamma_{i,j} / K! <d^K f, (sum_l j_l v_l)^{(x)K}>.
struct InterpolationPlan {
  int degree = 0;
  std::vector<int> i;
  std::vector<PlanMember> members;

  static InterpolationPlan make(const std::vector<int>& i);
};

// Directions of one symmetry class after merging all index tuples of a plan
// over the standard basis of R^D. pattern lists the nonzero direction
// coefficients in descending order (e.g. {3,1} for 3e_a + e_b). Each
// direction enters with weight / K!.
struct DirectionClass {
  std::vector<int> pattern;
  Fraction weight;
  Tensor directions;  // (count, D)

  std::size_t count() const { return directions.rank() == 2 ? directions.dim(0) : 0; }
};

// Expands sum over (d_1..d_I) in [D]^I of <d^K f, (x)_l e_{d_l}^{i_l}> into
// distinct directions, merging equal directions and grouping them by
// pattern and weight. Classes are ordered by descending pattern.
std::vector<DirectionClass> reduce_on_basis(const InterpolationPlan& plan, std::size_t dim);

// Evaluates sum_j gamma_{i,j}/K! <d^K f(x0), (sum_l j_l v_l)^{(x)K}> with K-jets
// for the given vectors v_l (each of shape (D)); x0 has shape (D).
Tensor interpolation_identity_check(const Program& program, const Tensor& x0, const std::vector<Tensor>& vectors,
                                    const std::vector<int>& i);

}  // namespace ctaylor
