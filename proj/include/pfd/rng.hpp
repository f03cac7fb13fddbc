#pragma once

#include <cstdint>

namespace pfd {

// Counter-based generator: the i-th draw is splitmix64(seed + (i+1)*GAMMA),
// so the stream is a pure function of (seed, counter) and reproduces
// bit-identically on every platform. fork(k) derives an independent stream.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed = 0) : seed_(seed) {}

  std::uint64_t next_u64();

  // Uniform in [0, 1), 53-bit resolution.
  double next_double();

  CounterRng fork(std::uint64_t stream) const;

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

}  // namespace pfd
