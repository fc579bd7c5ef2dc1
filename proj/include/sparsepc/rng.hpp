#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace sparsepc {

/// Combines seed material into one 64-bit seed (splitmix64 finalizer chain).
std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts) noexcept;

/// Bit pattern of a double, for hashing grid coordinates into seeds.
std::uint64_t double_bits(double x) noexcept;

/// Deterministic random stream. std::mt19937_64's output sequence is fixed by
/// the standard; the conversions below avoid the implementation-defined
/// standard distributions so a seed reproduces across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() noexcept;
  /// Uniform integer in [0, bound), bound > 0.
  std::uint64_t below(std::uint64_t bound) noexcept;
  /// Standard normal via Box-Muller (pairs are cached).
  double normal() noexcept;

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace sparsepc
