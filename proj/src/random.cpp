#include "clsel/random.hpp"

#include <cmath>
#include <numbers>

#include "clsel/errors.hpp"

namespace clsel {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t RandomStream::derive_seed(std::uint64_t seed,
                                        std::uint64_t stream_id) {
  return splitmix64(seed ^ (0x9E3779B97F4A7C15ULL * (stream_id + 1)));
}

RandomStream RandomStream::derive(std::uint64_t seed, std::uint64_t stream_id) {
  return RandomStream(derive_seed(seed, stream_id));
}

double RandomStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RandomStream::normal() {
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  return r * std::cos(2.0 * std::numbers::pi * u2);
}

bool RandomStream::bernoulli(double p) { return uniform() < p; }

std::uint64_t RandomStream::bounded(std::uint64_t n) {
  if (n == 0) throw ParameterError("bounded(): n must be positive");
  return engine_() % n;
}

std::vector<int> RandomStream::sample_without_replacement(int n, int k) {
  if (k < 0 || k > n)
    throw ParameterError("sample_without_replacement(): need 0 <= k <= n");
  std::vector<int> pool(n);
  for (int i = 0; i < n; ++i) pool[i] = i;
  std::vector<int> out;
  out.reserve(k);
  for (int i = 0; i < k; ++i) {
    const auto j = i + static_cast<int>(bounded(static_cast<std::uint64_t>(n - i)));
    std::swap(pool[i], pool[j]);
    out.push_back(pool[i]);
  }
  return out;
}

}  // namespace clsel
