#pragma once

#include <cstdint>
#include <limits>
#include <string_view>

namespace tbrain {

/// Counter-based generator: output i is a pure function of (key, i), so any
/// stream can be reproduced or forked without sharing mutable state.
///
/// Streams are derived by name ("world", "init", "sampling", ...) or by index,
/// which lets independent pipelines run in any order without perturbing each
/// other. Satisfies UniformRandomBitGenerator, but the library only uses its
/// own uniform()/normal() so results are identical across standard libraries.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed);
  Rng(std::uint64_t seed, std::string_view stream);

  [[nodiscard]] Rng substream(std::string_view name) const;
  [[nodiscard]] Rng substream(std::uint64_t index) const;

  result_type operator()() { return next(); }
  result_type next();

  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  /// Standard normal via Box-Muller (no cached second variate).
  double normal();

  [[nodiscard]] std::uint64_t key() const { return key_; }
  [[nodiscard]] std::uint64_t counter() const { return counter_; }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

 private:
  Rng(std::uint64_t key, std::uint64_t counter, int);

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t mix64(std::uint64_t x);
std::uint64_t hash_name(std::string_view name);

}  // namespace tbrain
