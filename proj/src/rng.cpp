#include "fdpo/rng.hpp"

#include <cmath>
#include <numbers>

namespace fdpo {

std::uint64_t CounterRng::mix(std::uint64_t x) {
  // splitmix64 finalizer
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

CounterRng CounterRng::split(std::string_view label) const {
  // FNV-1a over the label, then folded into the key.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return CounterRng(Key{}, mix(key_ ^ mix(h)));
}

CounterRng CounterRng::split(std::uint64_t index) const {
  return CounterRng(Key{}, mix(key_ + mix(index ^ 0xa5a5a5a5a5a5a5a5ULL)));
}

std::uint64_t CounterRng::next_u64() { return mix(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

double CounterRng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double CounterRng::uniform_open() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::normal() {
  // Box-Muller, one output per call.
  const double u1 = uniform_open();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t CounterRng::below(std::uint64_t bound) {
  // Reject the top partial block so every residue is equally likely.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  while (true) {
    const std::uint64_t x = next_u64();
    if (x < limit) return x % bound;
  }
}

}  // namespace fdpo
