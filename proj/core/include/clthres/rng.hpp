#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace clthres {

/// SplitMix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Folds several integers into one well-mixed 64-bit seed. Used to derive
/// per-trial seeds from (master seed, n, beta, trial) so that any cell of an
/// experiment can be replayed on its own.
std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts) noexcept;

/// Deterministic random source identified by (seed, stream). Two instances
/// built from the same pair produce the same sequence; distinct streams are
/// independent for practical purposes. Satisfies UniformRandomBitGenerator.
class SeededRng {
 public:
  using result_type = std::uint64_t;

  explicit SeededRng(std::uint64_t seed, std::uint64_t stream = 0);

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on {0, ..., n-1}, unbiased. Requires n >= 1.
  std::uint64_t uniform_index(std::uint64_t n);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
};

}  // namespace clthres
