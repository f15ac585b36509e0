#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "ctaylor/operators.hpp"

namespace ctaylor {

enum class OperatorKind { Laplacian, WeightedLaplacian, Biharmonic };

// Accepts "laplacian", "weighted-laplacian", "biharmonic".
OperatorKind parse_operator(std::string_view name);
std::string to_string(OperatorKind op);

// Vectors propagated through every node for a single datum. r_or_s is the
// rank R of sigma for the exact weighted Laplacian and the sample count S
// for stochastic operators; it is ignored for the exact Laplacian and the
// exact biharmonic, whose direction counts follow from dim.
std::size_t count_vectors(OperatorKind op, bool exact, Mode mode, std::size_t dim, std::size_t r_or_s);

// Vectors added by one more datum (exact) or one more sample (stochastic).
std::size_t marginal_vectors(OperatorKind op, bool exact, Mode mode, std::size_t dim, std::size_t r_or_s);

// Collapsed over standard marginal vectors.
double theoretical_ratio(OperatorKind op, bool exact, std::size_t dim, std::size_t r_or_s);

}  // namespace ctaylor
