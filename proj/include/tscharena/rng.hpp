#pragma once

#include <cstdint>
#include <random>

namespace tsch {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Stable combination of a run seed with stream identifiers (node id, purpose tag).
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c = 0) {
  std::uint64_t s = a * 0x9e3779b97f4a7c15ull + b * 0xd1342543de82ef95ull +
                    c * 0x2545f4914f6cdd1dull + 1;
  std::uint64_t out = splitmix64(s);
  out ^= splitmix64(s);
  return out;
}

// Thin deterministic wrapper; all floating draws go through next_double so the
// generated sequence does not depend on library distribution internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }
  double next_double() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  int next_int(int n) { return n <= 1 ? 0 : static_cast<int>(next_u64() % static_cast<std::uint64_t>(n)); }
  bool bernoulli(double p) { return next_double() < p; }

 private:
  std::mt19937_64 eng_;
};

}  // namespace tsch
