#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "swfb/channel.hpp"
#include "swfb/rng.hpp"

namespace swfb {

/// Message set {0, ..., M-1} with M = ceil(2^{nR}); messages are K-bit strings, MSB first.
class MessageSpace {
 public:
  explicit MessageSpace(double total_bits);

  int bits() const noexcept { return static_cast<int>(max_.size()); }
  /// log2 M.
  double log2_size() const noexcept { return log2_size_; }
  /// Bits of M - 1.
  const std::vector<std::uint8_t>& max_message() const noexcept { return max_; }
  bool contains(const std::vector<std::uint8_t>& m) const;
  std::vector<std::uint8_t> zero() const { return std::vector<std::uint8_t>(max_.size(), 0); }
  std::vector<std::uint8_t> uniform(Rng& rng) const;

 private:
  std::vector<std::uint8_t> max_;
  double log2_size_ = 0.0;
};

struct SchemeConfig {
  MacChannel channel = make_binary_adder();
  double p = 0.5;
  int n = 60;
  int B = 4;
  double R1 = 0.0;
  /// Negative selects 0.8 I(X2;Yd) under input_dist.
  double R0 = -1.0;
  /// Second sender's rate; used by the no-feedback baseline only.
  double R2 = 0.0;
  /// P(x1, x2) laid out [x1][x2]; empty selects uniform.
  std::vector<double> input_dist;
  double epsilon = 1.0;
  std::uint64_t seed = 1;
  /// Fraction of each codeword after which no new message bits enter.
  double tail_fraction_x1 = 0.25;
  double tail_fraction_x2 = 0.2;
  /// Decoder search nodes per stage before giving up (counted as an error).
  std::uint64_t node_budget = std::uint64_t{1} << 22;
  int threads = 1;
};

struct SimReport {
  std::uint64_t trials = 0;
  std::uint64_t errors = 0;
  std::uint64_t stage1_errors = 0;
  std::uint64_t stage2_errors = 0;
  std::uint64_t search_overflows = 0;
  std::uint64_t atypical_truth = 0;
  double error_rate = 0.0;
  double ci_low = 0.0;
  double ci_high = 1.0;
  double mean_decode_seconds = 0.0;
  double effective_rate = 0.0;
  double r0_used = 0.0;
  /// Feedforward fraction per trial stayed within 0.25 of p.
  std::uint64_t switch_fraction_ok = 0;
  std::uint64_t switch_fraction_checked = 0;
};

/// Exact (Clopper-Pearson) two-sided interval for a binomial proportion.
std::pair<double, double> clopper_pearson(std::uint64_t errors, std::uint64_t trials,
                                          double confidence = 0.95);

/// Lazily evaluated random codes for one trial. Codewords are tree-structured:
/// the symbol at position t depends on the first e(t) message bits, and every
/// symbol is drawn from the codebook law by a keyed pseudorandom function.
class CodebookBundle {
 public:
  CodebookBundle(const SchemeConfig& config, double r0, std::uint64_t trial_seed);

  const MessageSpace& m1_space() const noexcept { return m1_; }
  const MessageSpace& m0_space() const noexcept { return m0_; }
  int n() const noexcept { return n_; }

  std::vector<int> x2_codeword(const std::vector<std::uint8_t>& m0) const;
  std::vector<int> x1_codeword(const std::vector<std::uint8_t>& m1,
                               const std::vector<std::uint8_t>& m0,
                               const std::vector<int>& x2) const;
  /// Bin index of a Z-sequence, uniform on the m0 space. The bin space has
  /// 2^floor(nR0) elements; bit j depends on the Z prefix through position
  /// bin_end-1 so a decoder can test it before the sequence is complete.
  std::vector<std::uint8_t> bin(const std::vector<int>& z) const;
  /// Number of bin bits determined once positions 0..t of Z are known.
  const std::vector<int>& bin_end() const noexcept { return bin_end_; }
  std::uint64_t bin_key() const noexcept { return bin_key_; }
  static std::uint64_t extend_z(std::uint64_t h, int z) noexcept {
    return mix(h, static_cast<std::uint64_t>(z) + 1);
  }
  static std::uint8_t bin_bit(std::uint64_t z_prefix_hash, int j) noexcept {
    return static_cast<std::uint8_t>(mix(z_prefix_hash, 0xB17ULL + static_cast<std::uint64_t>(j)) >> 63);
  }

  /// Number of message bits in effect at position t.
  const std::vector<int>& x1_schedule() const noexcept { return x1_schedule_; }
  const std::vector<int>& x2_schedule() const noexcept { return x2_schedule_; }
  std::uint64_t x1_key(const std::vector<std::uint8_t>& m0) const;
  std::uint64_t x2_key() const noexcept { return x2_key_; }

  const std::vector<double>& p_x2() const noexcept { return p_x2_; }
  /// P(x1 | x2) rows, laid out [x2][x1].
  const std::vector<double>& p_x1_given_x2() const noexcept { return p_x1_given_x2_; }

 private:
  int n_;
  int n1_;
  int n2_;
  MessageSpace m1_;
  MessageSpace m0_;
  std::vector<int> x1_schedule_;
  std::vector<int> x2_schedule_;
  std::uint64_t x1_key_;
  std::uint64_t x2_key_;
  std::uint64_t bin_key_;
  std::vector<double> p_x2_;
  std::vector<double> p_x1_given_x2_;
  std::vector<int> bin_end_;
};

/// e(t) = min(K, ceil(K (t+1) / active)), active = max(1, n - floor(tail n)).
std::vector<int> bit_schedule(int bits, int n, double tail_fraction);

/// Prefix-hash chain step and symbol draw shared by encoder and decoder.
std::uint64_t extend_prefix(std::uint64_t h, std::uint8_t bit) noexcept;
int draw_symbol(std::uint64_t prefix_hash, int t, std::span<const double> law) noexcept;

/// R0 used when the configuration leaves it negative.
double default_r0(const SchemeConfig& config);
/// Validates the configuration and fills the defaults (input_dist, R0).
SchemeConfig resolve_config(const SchemeConfig& config);

SimReport run_block_markov(const SchemeConfig& config, std::uint64_t trials);
SimReport run_no_feedback_baseline(const SchemeConfig& config, std::uint64_t trials);

enum class SweepAxis { n, p, R1 };
enum class Scheme { block_markov, baseline };

SweepAxis parse_axis(const std::string& s);
Scheme parse_scheme(const std::string& s);

struct SweepRow {
  double axis_value;
  SimReport report;
};

std::vector<SweepRow> sweep(const SchemeConfig& base, SweepAxis axis,
                            const std::vector<double>& values, std::uint64_t trials,
                            Scheme scheme = Scheme::block_markov);

/// CSV with columns axis_value, trials, errors, error_rate, ci_low, ci_high,
/// stage1_errors, stage2_errors, seed.
std::string sweep_csv(const std::vector<SweepRow>& rows, std::uint64_t seed);

/// Double symmetric binary source with crossover q.
std::vector<double> dsbs(double q);

}  // namespace swfb
