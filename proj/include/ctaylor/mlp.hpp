#pragma once

#include <cstdint>
#include <vector>

#include "ctaylor/program.hpp"

namespace ctaylor {

struct MlpSpec {
  std::vector<std::size_t> widths;  // D, hidden..., C
  std::uint64_t seed = 0;

  // D -> 768 -> 768 -> 512 -> 512 -> 1
  static MlpSpec reference(std::size_t dim, std::uint64_t seed = 0);
  // D -> 64 -> 64 -> 1
  static MlpSpec small(std::size_t dim, std::uint64_t seed = 0);
};

// Affine layers with tanh between them (none after the last). Weights and
// biases are uniform on [-1/sqrt(fan_in), 1/sqrt(fan_in)], drawn from a
// CounterRng with one stream per layer (streams 256 + l).
Program build_mlp(const MlpSpec& spec);

}  // namespace ctaylor
