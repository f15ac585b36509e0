#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "ctaylor/program.hpp"
#include "ctaylor/tensor.hpp"

namespace ctaylor {

class MixedBatching : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A K-jet (x0, x1, ..., xK). Coefficients share the primal's shape, or carry
// one extra leading axis of extent `directions` (R) when batched. With
// collapsed_top the top coefficient holds the sum over directions of the
// batched top coefficients and is therefore unbatched.
struct Jet {
  Tensor primal;
  std::vector<Tensor> coeffs;  // coeffs[k - 1] is x_k
  std::size_t directions = 0;
  bool collapsed_top = false;

  int degree() const { return static_cast<int>(coeffs.size()); }
  const Tensor& coeff(int k) const { return k == 0 ? primal : coeffs.at(static_cast<std::size_t>(k - 1)); }
  bool batched(int k) const { return k > 0 && coeff(k).rank() == primal.rank() + 1; }

  // Throws ShapeError or MixedBatching when the invariants are violated.
  void validate() const;
};

// Jet with a shared primal, batched x1 = directions (R, ...) and the given
// degree; all higher coefficients are zero and batched.
Jet directional_jet(const Tensor& x0, const Tensor& directions, int degree);

// Replaces the batched top coefficient by its sum over directions.
Jet collapse_top(const Jet& jet);

// Applies the Taylor rule of one primitive to its input jets.
Jet propagate_primitive(const Primitive& op, std::span<const Jet> inputs);

// Pushes a seed jet through every node of the program.
Jet jet_eval(const Program& program, const Jet& seed);

}  // namespace ctaylor
