#pragma once
#include <cmath>
#include <cstdint>

namespace cslcosmo {

// Counter-based normal deviates: the value drawn for (seed, stream, step) is
// a pure function of its arguments, so ensembles reproduce exactly regardless
// of thread count or evaluation order. Mixing is two rounds of the splitmix64
// finalizer over the keyed counter.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : key_(mix(mix(seed + 0x9e3779b97f4a7c15ull) ^ mix(stream + 0xbf58476d1ce4e5b9ull))) {}

  // standard normal deviate for the given step counter (Box-Muller)
  double normal(std::uint64_t step) const {
    const std::uint64_t r1 = mix(key_ ^ mix(2 * step + 1));
    const std::uint64_t r2 = mix(key_ ^ mix(2 * step + 2));
    // u1 in (0, 1]: never 0, so the log is finite
    const double u1 = (static_cast<double>(r1 >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = static_cast<double>(r2 >> 11) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }

  std::uint64_t key() const { return key_; }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
};

}  // namespace cslcosmo
