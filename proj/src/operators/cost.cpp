#include "ctaylor/cost.hpp"

#include <stdexcept>

namespace ctaylor {

OperatorKind parse_operator(std::string_view name) {
  if (name == "laplacian") return OperatorKind::Laplacian;
  if (name == "weighted-laplacian") return OperatorKind::WeightedLaplacian;
  if (name == "biharmonic") return OperatorKind::Biharmonic;
  throw std::invalid_argument("unknown operator '" + std::string(name) + "'");
}

std::string to_string(OperatorKind op) {
  switch (op) {
    case OperatorKind::Laplacian: return "laplacian";
    case OperatorKind::WeightedLaplacian: return "weighted-laplacian";
    case OperatorKind::Biharmonic: return "biharmonic";
  }
  return "?";
}

namespace {

// K-jets with x1 seeded and x2..xK zero, grouped by direction family.
std::size_t grouped(Mode mode, int degree, std::initializer_list<std::size_t> groups) {
  const auto k = static_cast<std::size_t>(degree);
  std::size_t n = 1;
  for (std::size_t r : groups) n += mode == Mode::Standard ? k * r : (k - 1) * r + 1;
  return n;
}

}  // namespace

std::size_t count_vectors(OperatorKind op, bool exact, Mode mode, std::size_t dim, std::size_t r_or_s) {
  if (dim < 1) throw std::invalid_argument("dimension must be at least 1");
  if (!exact && r_or_s < 1) throw std::invalid_argument("stochastic operators need at least one sample");
  switch (op) {
    case OperatorKind::Laplacian: return grouped(mode, 2, {exact ? dim : r_or_s});
    case OperatorKind::WeightedLaplacian: return grouped(mode, 2, {r_or_s});
    case OperatorKind::Biharmonic:
      if (!exact) return grouped(mode, 4, {r_or_s});
      return grouped(mode, 4, {dim, dim * (dim - 1), dim * (dim - 1) / 2});
  }
  throw std::invalid_argument("unknown operator");
}

std::size_t marginal_vectors(OperatorKind op, bool exact, Mode mode, std::size_t dim, std::size_t r_or_s) {
  if (exact) return count_vectors(op, exact, mode, dim, r_or_s);
  return count_vectors(op, exact, mode, dim, r_or_s + 1) - count_vectors(op, exact, mode, dim, r_or_s);
}

double theoretical_ratio(OperatorKind op, bool exact, std::size_t dim, std::size_t r_or_s) {
  return static_cast<double>(marginal_vectors(op, exact, Mode::Collapsed, dim, r_or_s)) /
         static_cast<double>(marginal_vectors(op, exact, Mode::Standard, dim, r_or_s));
}

}  // namespace ctaylor
