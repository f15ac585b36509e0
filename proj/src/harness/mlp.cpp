#include "ctaylor/mlp.hpp"

#include <cmath>
#include <stdexcept>

#include "ctaylor/random.hpp"

namespace ctaylor {

MlpSpec MlpSpec::reference(std::size_t dim, std::uint64_t seed) { return {{dim, 768, 768, 512, 512, 1}, seed}; }

MlpSpec MlpSpec::small(std::size_t dim, std::uint64_t seed) { return {{dim, 64, 64, 1}, seed}; }

Program build_mlp(const MlpSpec& spec) {
  if (spec.widths.size() < 2) throw std::invalid_argument("an MLP needs input and output widths");
  for (std::size_t w : spec.widths)
    if (w == 0) throw std::invalid_argument("MLP widths must be positive");
  Program p;
  int x = p.input();
  const std::size_t layers = spec.widths.size() - 1;
  for (std::size_t l = 0; l < layers; ++l) {
    const std::size_t in = spec.widths[l];
    const std::size_t out = spec.widths[l + 1];
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    CounterRng rng(spec.seed, 0x100 + l);
    Tensor w = Tensor::zeros({out, in});
    Tensor b = Tensor::zeros({out});
    for (std::size_t i = 0; i < w.numel(); ++i) w[i] = rng.uniform(-bound, bound);
    for (std::size_t i = 0; i < b.numel(); ++i) b[i] = rng.uniform(-bound, bound);
    x = p.affine(x, std::move(w), std::move(b));
    if (l + 1 < layers) x = p.tanh(x);
  }
  p.set_output(x);
  return p;
}

}  // namespace ctaylor
