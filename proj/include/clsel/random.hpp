#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace clsel {

std::uint64_t splitmix64(std::uint64_t x);

// Seedable random stream with fixed draw semantics, so that every output of
// the library is reproducible from (inputs, config, seed) alone. Streams are
// never shared between workers; derive one stream per chain and one per
// replicate via derive()/derive_seed().
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  // Independent child seed for (seed, stream_id). Chained derivation
  // (cell -> replicate -> purpose) gives a deterministic stream tree.
  static std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream_id);
  static RandomStream derive(std::uint64_t seed, std::uint64_t stream_id);

  // Uniform draw on [0, 1), 53-bit resolution.
  double uniform();

  // Standard normal via Box-Muller; consumes exactly two uniforms.
  double normal();

  // Consumes exactly one uniform.
  bool bernoulli(double p);

  // Integer in {0, ..., n-1}. Uses modulo reduction; the bias is far below
  // anything observable at the range sizes used here.
  std::uint64_t bounded(std::uint64_t n);

  // k distinct indices from {0, ..., n-1} by partial Fisher-Yates, in draw
  // order.
  std::vector<int> sample_without_replacement(int n, int k);

 private:
  std::mt19937_64 engine_;
};

}  // namespace clsel
