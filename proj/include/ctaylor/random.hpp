#pragma once

#include <cstdint>

#include "ctaylor/tensor.hpp"

namespace ctaylor {

// Counter-based generator: draw i of stream s is a pure function of
// (seed, stream, i), computed with the SplitMix64 finalizer.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) : seed_(seed), stream_(stream) {}

  std::uint64_t bits(std::uint64_t counter) const;

  std::uint64_t next_bits() { return bits(counter_++); }
  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double gaussian();
  double rademacher() { return (next_bits() >> 63) ? 1.0 : -1.0; }

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
};

enum class Distribution { Rademacher, Gaussian };

// (rows, cols) matrix of i.i.d. unit-variance draws.
Tensor sample_directions(Distribution dist, std::size_t rows, std::size_t cols, std::uint64_t seed);

}  // namespace ctaylor
