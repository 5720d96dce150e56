#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "swfb/rng.hpp"

namespace swfb {

/// Finite-alphabet two-input channel law P(y | x1, x2).
///
/// The table is stored as [x1][x2][y]. Rows are stochastic to 1e-12; use
/// load_channel() for documents that need tolerant ingestion.
class MacChannel {
 public:
  MacChannel(int x1_size, int x2_size, int y_size, std::vector<double> transition);

  /// Channel with y = f(x1, x2).
  static MacChannel deterministic(int x1_size, int x2_size, int y_size,
                                  const std::function<int(int, int)>& f);

  int x1_size() const noexcept { return x1_size_; }
  int x2_size() const noexcept { return x2_size_; }
  int y_size() const noexcept { return y_size_; }
  int input_count() const noexcept { return x1_size_ * x2_size_; }

  /// Index of the erasure symbol in the extended output alphabet.
  int erasure() const noexcept { return y_size_; }
  int extended_y_size() const noexcept { return y_size_ + 1; }

  double operator()(int x1, int x2, int y) const noexcept {
    return transition_[(static_cast<std::size_t>(x1) * x2_size_ + x2) * y_size_ + y];
  }
  std::span<const double> row(int x1, int x2) const noexcept {
    return {transition_.data() + (static_cast<std::size_t>(x1) * x2_size_ + x2) * y_size_,
            static_cast<std::size_t>(y_size_)};
  }
  /// Row for compound input index x = x1 * x2_size + x2.
  std::span<const double> row(int compound) const noexcept {
    return {transition_.data() + static_cast<std::size_t>(compound) * y_size_,
            static_cast<std::size_t>(y_size_)};
  }
  const std::vector<double>& table() const noexcept { return transition_; }

  bool operator==(const MacChannel&) const = default;

 private:
  int x1_size_;
  int x2_size_;
  int y_size_;
  std::vector<double> transition_;
};

MacChannel make_binary_adder();
MacChannel make_binary_xor();
/// Y = X1; the second input is ignored.
MacChannel make_first_input_identity(int size = 2);

struct ProfileSegment {
  double t_start;
  double t_end;
  double p;

  bool operator==(const ProfileSegment&) const = default;
};

/// Piecewise-constant feedforward probability p(t) on [0, 1].
class FeedforwardProfile {
 public:
  explicit FeedforwardProfile(std::vector<ProfileSegment> segments);

  static FeedforwardProfile constant(double p);
  /// All feedback first, then all feedforward: p(t) = 0 for t < 1 - p_avg, 1 after.
  static FeedforwardProfile step(double p_avg);
  /// Equal-width blocks with the given values, in order.
  static FeedforwardProfile from_blocks(std::span<const double> block_values);

  const std::vector<ProfileSegment>& segments() const noexcept { return segments_; }

  /// Integral of p(t) over [a, b] computed from segment overlaps.
  double integral(double a, double b) const;
  double average() const;

  bool operator==(const FeedforwardProfile&) const = default;

 private:
  std::vector<ProfileSegment> segments_;
};

/// Per-use feedforward probabilities p_i = n * integral of p(t) over [(i-1)/n, i/n].
/// Exact when a single segment covers the interval.
std::vector<double> compute_switch_probs(const FeedforwardProfile& profile, int n);

struct SwitchedChannelInstance {
  SwitchedChannelInstance(MacChannel channel, FeedforwardProfile profile, int n,
                          std::uint64_t seed);

  MacChannel channel;
  FeedforwardProfile profile;
  int n;
  std::vector<double> switch_probs;
  std::uint64_t seed;
};

/// One block of channel uses. y_d and y_e are over the extended alphabet;
/// exactly one of them is the erasure symbol at every position.
struct BlockSample {
  std::vector<int> y_raw;
  std::vector<int> y_d;
  std::vector<int> y_e;
  std::vector<std::uint8_t> v;
};

BlockSample sample_block(const SwitchedChannelInstance& instance, std::span<const int> x1,
                         std::span<const int> x2, Rng& stream);

/// Convenience overload drawing from substream `block_index` of the instance seed.
BlockSample sample_block(const SwitchedChannelInstance& instance, std::span<const int> x1,
                         std::span<const int> x2, std::uint64_t block_index);

// Document formats. Channel: {x1_size, x2_size, y_size, transition[x1][x2][y]}.
// Profile: [{t_start, t_end, p}, ...].

MacChannel load_channel(const nlohmann::json& doc);
nlohmann::json channel_to_json(const MacChannel& channel);
FeedforwardProfile load_profile(const nlohmann::json& doc);
nlohmann::json profile_to_json(const FeedforwardProfile& profile);

MacChannel load_channel_file(const std::string& path);
FeedforwardProfile load_profile_file(const std::string& path);

}  // namespace swfb
