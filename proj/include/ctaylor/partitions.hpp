#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ctaylor {

inline constexpr int kMaxDegree = 8;

// An integer partition of k with parts sorted in ascending order and its
// Faa di Bruno multiplicity nu = k! / (prod_s n_s! * prod_s (s!)^{n_s}).
struct Partition {
  std::vector<int> parts;
  std::int64_t multiplicity = 0;

  int size() const { return static_cast<int>(parts.size()); }
  // Number of parts equal to s.
  int count(int s) const;
  bool trivial() const { return parts.size() == 1; }
  std::string to_string() const;
};

// All partitions of k in lexicographic order of their ascending parts, so
// {1,...,1} comes first and the trivial partition {k} last.
// Throws std::out_of_range unless 1 <= k <= kMaxDegree.
const std::vector<Partition>& partitions(int k);

std::int64_t factorial(int n);
std::int64_t binomial(int n, int k);

}  // namespace ctaylor
