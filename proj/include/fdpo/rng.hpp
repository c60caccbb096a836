#pragma once

#include <cstdint>
#include <string_view>

namespace fdpo {

// Counter-based generator: the n-th draw is a pure hash of (key, n), so
// results do not depend on the platform's <random> distributions. split()
// derives an independent stream from a label.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : key_(mix(seed ^ 0x6a09e667f3bcc909ULL)) {}

  CounterRng split(std::string_view label) const;
  CounterRng split(std::uint64_t index) const;

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 bits.
  double uniform();
  /// Uniform on (0, 1).
  double uniform_open();
  double normal();
  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);

  std::uint64_t key() const { return key_; }

  static std::uint64_t mix(std::uint64_t x);

 private:
  struct Key {};
  CounterRng(Key, std::uint64_t key) : key_(key) {}

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace fdpo
