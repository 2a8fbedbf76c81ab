#include "tbrain/rng.hpp"

#include <cmath>
#include <numbers>

namespace tbrain {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t mix64(std::uint64_t x) {
  // SplitMix64 finalizer.
  x += kGolden;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t hash_name(std::string_view name) {
  // FNV-1a, 64 bit.
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (const char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

Rng::Rng(std::uint64_t seed) : key_(mix64(seed)) {}

Rng::Rng(std::uint64_t seed, std::string_view stream) : key_(mix64(mix64(seed) ^ hash_name(stream))) {}

Rng::Rng(std::uint64_t key, std::uint64_t counter, int) : key_(key), counter_(counter) {}

Rng Rng::substream(std::string_view name) const { return Rng(mix64(key_ ^ hash_name(name)), 0, 0); }

Rng Rng::substream(std::uint64_t index) const { return Rng(mix64(key_ + mix64(index ^ kGolden)), 0, 0); }

Rng::result_type Rng::next() {
  ++counter_;
  return mix64(key_ ^ mix64(counter_ * kGolden));
}

double Rng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) {
    u1 = uniform();
  }
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace tbrain
