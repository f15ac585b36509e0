#pragma once

#include <string>
#include <vector>

#include "ctaylor/graph.hpp"
#include "ctaylor/program.hpp"

namespace ctaylor {

// One family of R directions sharing the primal x0. Coefficient x_k is a
// batched leaf when seeded[k-1] is set and a structural zero otherwise.
struct SeedGroup {
  std::string prefix;  // prepended to leaf and output names
  std::size_t directions = 0;
  std::vector<bool> seeded;
};

struct SeedLayout {
  int degree = 0;
  std::vector<SeedGroup> groups;

  // x1 seeded, x2..xK structural zeros.
  static SeedLayout directional(int degree, std::size_t directions);
  // Every coefficient x1..xK seeded.
  static SeedLayout full(int degree, std::size_t directions);
};

// Traces the standard Taylor propagation of a program into the IR. x0 is a
// leaf named "x0" replicated once per group, so every group computes on
// batched values. Leaves are "<prefix>x<k>_r"; outputs are "<prefix>f<k>_r"
// for k < K and the direction sum "<prefix>f<K>". Parameters are named
// "W<node>" and "b<node>".
ir::Graph capture(const Program& program, const SeedLayout& layout);

}  // namespace ctaylor
