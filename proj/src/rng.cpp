#include "pfd/rng.hpp"

namespace pfd {
namespace {

constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

std::uint64_t splitmix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ull;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBull;
  x ^= x >> 31;
  return x;
}

}  // namespace

std::uint64_t CounterRng::next_u64() {
  ++counter_;
  return splitmix64(seed_ + counter_ * kGamma);
}

double CounterRng::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

CounterRng CounterRng::fork(std::uint64_t stream) const {
  return CounterRng(splitmix64(seed_ ^ splitmix64(0x5851F42D4C957F2Dull + stream * kGamma)));
}

}  // namespace pfd
