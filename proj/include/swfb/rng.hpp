#pragma once

#include <cstdint>
#include <span>

namespace swfb {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Order-sensitive combination of two words; the building block for keyed
/// pseudorandom functions and substream derivation.
constexpr std::uint64_t mix(std::uint64_t a, std::uint64_t b) noexcept {
  return splitmix64(a ^ splitmix64(b ^ 0xD6E8FEB86659FD93ULL));
}

/// Maps 64 random bits to a double in [0, 1).
constexpr double to_unit(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Counter-based generator. A stream is identified by its seed; substreams
/// are derived by hashing (seed, index), so any set of trials can be
/// replayed independently of the order or thread in which they run.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) noexcept : seed_(seed) {}

  std::uint64_t next() noexcept { return splitmix64(seed_ ^ mix(counter_++, 0x5851F42D4C957F2DULL)); }
  double uniform() noexcept { return to_unit(next()); }
  bool bernoulli(double p) noexcept { return uniform() < p; }

  /// Inverse-CDF draw from a probability vector. Rounding slack at the top
  /// end lands on the last index with positive mass.
  int categorical(std::span<const double> probs) noexcept;

  Rng substream(std::uint64_t index) const noexcept { return Rng(mix(seed_, index)); }
  std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

/// Inverse-CDF lookup of a uniform variate in a probability vector.
int sample_index(std::span<const double> probs, double u) noexcept;

}  // namespace swfb
