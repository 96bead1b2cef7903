#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace chartsynth {

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Combines a parent seed with an ordinal; used for (seed, index) keyed draws.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t value) noexcept;

/// Named derivation: FNV-1a of `name` hashed together with `seed`. Sources that
/// derive from the same parent under different names get independent streams.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view name) noexcept;

/// Seeded generator with distribution code owned here rather than taken from
/// <random>, whose distributions are implementation-defined. Only the
/// mt19937_64 engine (fully specified by the standard) is borrowed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound);

  /// Uniform in [lo, hi], inclusive.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  /// Uniform in [0, 1) with 53 random bits.
  double uniform01();

  bool bernoulli(double p) { return uniform01() < p; }

  template <typename T>
  T pick(std::span<const T> items) {
    return items[static_cast<std::size_t>(below(items.size()))];
  }

  template <typename T>
  T pick(const std::vector<T>& items) {
    return items[static_cast<std::size_t>(below(items.size()))];
  }

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      auto j = static_cast<std::size_t>(below(i));
      using std::swap;
      swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace chartsynth
