#include "ctaylor/random.hpp"

#include <cmath>
#include <numbers>

namespace ctaylor {

namespace {

std::uint64_t mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t CounterRng::bits(std::uint64_t counter) const {
  std::uint64_t key = mix(seed_ + 0x9e3779b97f4a7c15ULL * (stream_ + 1));
  return mix(key ^ (counter * 0x9e3779b97f4a7c15ULL + 0x632be59bd9b4e019ULL));
}

double CounterRng::uniform() { return static_cast<double>(next_bits() >> 11) * 0x1.0p-53; }

double CounterRng::gaussian() {
  // Box-Muller, one draw per pair of uniforms; 1 - u keeps the log finite.
  double u1 = 1.0 - uniform();
  double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Tensor sample_directions(Distribution dist, std::size_t rows, std::size_t cols, std::uint64_t seed) {
  CounterRng rng(seed, 1);
  Tensor out = Tensor::zeros({rows, cols});
  for (double& v : out.data()) v = dist == Distribution::Rademacher ? rng.rademacher() : rng.gaussian();
  return out;
}

}  // namespace ctaylor
