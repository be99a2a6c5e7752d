#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>

namespace macsim {

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ull);

/// Seed for an independent stream: splitmix64(master ^ splitmix64(fnv1a64(label))).
/// Blocks use their key as the label, so results do not depend on which
/// worker runs a block or in what order.
std::uint64_t derive_seed(std::uint64_t master, std::string_view label);

/// mt19937_64 with fixed, platform-independent integer and real mappings
/// (the std distributions are implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  std::uint32_t next_u32() { return static_cast<std::uint32_t>(engine_() >> 32); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  bool bernoulli(double p) { return uniform() < p; }
  /// Uniform integer on [0, n); n must be positive.
  std::size_t below(std::size_t n);

 private:
  std::mt19937_64 engine_;
};

}  // namespace macsim
