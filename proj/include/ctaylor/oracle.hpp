#pragma once

#include "ctaylor/program.hpp"
#include "ctaylor/tensor.hpp"

namespace ctaylor {

// Plain forward evaluation at a single point x0 of shape (D); returns (C).
Tensor evaluate_program(const Program& program, const Tensor& x0);

// Full derivative tensor d^k f(x0) of shape (C, D, ..., D) for 1 <= k <= 4,
// built from k nested first-order forward-mode duals per index tuple. Only
// sorted tuples are evaluated; the rest are filled by symmetry.
Tensor oracle_derivative(const Program& program, const Tensor& x0, int k);

// Single entry d^k f(x0)[:, idx_1, ..., idx_k].
Tensor oracle_entry(const Program& program, const Tensor& x0, const std::vector<std::size_t>& idx);

// sum_d d^2 f / dx_d^2 and sum_{a,b} d^4 f / dx_a^2 dx_b^2 from nested duals.
Tensor oracle_laplacian(const Program& program, const Tensor& x0);
Tensor oracle_biharmonic(const Program& program, const Tensor& x0);

// <d^k f(x0), v^{(x)k}> from central differences of t -> f(x0 + t v) with
// step h and h/2 combined by Richardson extrapolation; error O(h^4).
Tensor finite_difference(const Program& program, const Tensor& x0, const Tensor& v, int k, double h = 0.0);

}  // namespace ctaylor
