#include "swfb/sim.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <boost/math/distributions/beta.hpp>

#include "swfb/capacity.hpp"
#include "swfb/errors.hpp"
#include "swfb/info.hpp"

namespace swfb {

namespace {

constexpr int kMaxBitsPerPosition = 16;
constexpr std::uint64_t kMaxTotalUses = std::uint64_t{1} << 26;
constexpr double kMaxMessageBits = 4096.0;

using Bits = std::vector<std::uint8_t>;

std::uint64_t hash_bits(std::uint64_t key, const Bits& bits) noexcept {
  std::uint64_t h = key;
  for (auto b : bits) h = extend_prefix(h, b);
  return h;
}

// Domain-separation tags for per-trial keys.
enum : std::uint64_t { kTagX2 = 1, kTagX1 = 2, kTagBin = 3, kTagMsg = 4, kTagChannel = 5 };

}  // namespace

MessageSpace::MessageSpace(double total_bits) {
  if (!std::isfinite(total_bits) || total_bits < 0.0)
    throw ValidationError("message rate must be finite and nonnegative");
  if (total_bits > kMaxMessageBits)
    throw ResourceError("message space above 2^4096; reduce n or the rate");
  if (total_bits <= 62.0 || total_bits == std::floor(total_bits)) {
    if (total_bits > 62.0) {
      max_.assign(static_cast<std::size_t>(total_bits), 1);
      log2_size_ = total_bits;
      return;
    }
    const auto m = static_cast<std::uint64_t>(std::ceil(std::exp2(total_bits) - 1e-9));
    const std::uint64_t top = std::max<std::uint64_t>(m, 1) - 1;
    const int k = static_cast<int>(std::bit_width(top));
    max_.resize(k);
    for (int i = 0; i < k; ++i) max_[i] = static_cast<std::uint8_t>((top >> (k - 1 - i)) & 1U);
    log2_size_ = std::log2(static_cast<double>(std::max<std::uint64_t>(m, 1)));
  } else {
    // M - 1 just below 2^{nR}: the leading 53 bits come from the mantissa, the rest are ones.
    const double whole = std::floor(total_bits);
    const int k = static_cast<int>(whole) + 1;
    const auto mant =
        static_cast<std::uint64_t>(std::ldexp(std::exp2(total_bits - whole), 52)) - 1;
    max_.assign(k, 1);
    for (int i = 0; i < 53; ++i) max_[i] = static_cast<std::uint8_t>((mant >> (52 - i)) & 1U);
    log2_size_ = total_bits;
  }
}

bool MessageSpace::contains(const Bits& m) const {
  if (m.size() != max_.size()) return false;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m[i] > 1) return false;
    if (m[i] != max_[i]) return m[i] < max_[i];
  }
  return true;
}

Bits MessageSpace::uniform(Rng& rng) const {
  Bits m(max_.size());
  for (;;) {
    for (std::size_t i = 0; i < m.size(); i += 64) {
      const std::uint64_t w = rng.next();
      for (std::size_t j = i; j < std::min(m.size(), i + 64); ++j)
        m[j] = static_cast<std::uint8_t>((w >> (j - i)) & 1U);
    }
    if (contains(m)) return m;
  }
}

std::pair<double, double> clopper_pearson(std::uint64_t errors, std::uint64_t trials,
                                          double confidence) {
  if (trials == 0) throw ValidationError("confidence interval needs at least one trial");
  if (errors > trials) throw ValidationError("more errors than trials");
  const double alpha = 1.0 - confidence;
  const auto k = static_cast<double>(errors), n = static_cast<double>(trials);
  double lo = 0.0, hi = 1.0;
  if (errors > 0) lo = boost::math::quantile(boost::math::beta_distribution<>(k, n - k + 1), alpha / 2);
  if (errors < trials)
    hi = boost::math::quantile(boost::math::beta_distribution<>(k + 1, n - k), 1 - alpha / 2);
  return {lo, hi};
}

std::vector<int> bit_schedule(int bits, int n, double tail_fraction) {
  if (n < 1) throw ValidationError("blocklength must be positive");
  if (!(tail_fraction >= 0.0 && tail_fraction < 1.0))
    throw ValidationError("tail fraction must lie in [0, 1)");
  const int active = std::max(1, n - static_cast<int>(std::floor(tail_fraction * n)));
  if (bits > static_cast<long long>(kMaxBitsPerPosition) * active)
    throw ResourceError("more than 16 message bits per codeword position; reduce the rate");
  std::vector<int> e(n);
  for (int t = 0; t < n; ++t) {
    const long long num = static_cast<long long>(bits) * (t + 1);
    e[t] = static_cast<int>(std::min<long long>(bits, (num + active - 1) / active));
  }
  return e;
}

std::uint64_t extend_prefix(std::uint64_t h, std::uint8_t bit) noexcept { return mix(h, bit + 1U); }

int draw_symbol(std::uint64_t prefix_hash, int t, std::span<const double> law) noexcept {
  return sample_index(law, to_unit(mix(prefix_hash, static_cast<std::uint64_t>(t))));
}

std::vector<double> dsbs(double q) {
  if (!(q >= 0.0 && q <= 1.0)) throw ValidationError("crossover must lie in [0, 1]");
  return {(1 - q) / 2, q / 2, q / 2, (1 - q) / 2};
}

double default_r0(const SchemeConfig& config) {
  const auto j = decoder_joint(config.channel, config.input_dist, config.p);
  return 0.8 * conditional_mutual_information(j, {"X2"}, {"Yd"}, {});
}

SchemeConfig resolve_config(const SchemeConfig& config) {
  SchemeConfig c = config;
  const int n1 = c.channel.x1_size(), n2 = c.channel.x2_size();
  if (c.input_dist.empty()) c.input_dist.assign(static_cast<std::size_t>(n1) * n2, 1.0 / (n1 * n2));
  if (c.input_dist.size() != static_cast<std::size_t>(n1) * n2)
    throw ValidationError("input distribution does not match the channel's input alphabets");
  double total = 0.0;
  for (double v : c.input_dist) {
    if (!(v >= 0.0)) throw ValidationError("input distribution has a negative entry");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ValidationError("input distribution does not sum to 1");
  if (!(c.p >= 0.0 && c.p <= 1.0)) throw ValidationError("p must lie in [0, 1]");
  if (c.n < 1) throw ValidationError("n must be at least 1");
  if (c.B < 2) throw ValidationError("B must be at least 2 (the last block carries no message)");
  if (static_cast<std::uint64_t>(c.n) * c.B > kMaxTotalUses)
    throw ResourceError("n*B above 2^26 channel uses; reduce n or B");
  if (!(c.R1 >= 0.0) || !std::isfinite(c.R1)) throw ValidationError("R1 must be nonnegative");
  if (!(c.R2 >= 0.0) || !std::isfinite(c.R2)) throw ValidationError("R2 must be nonnegative");
  if (!(c.epsilon > 0.0)) throw ValidationError("epsilon must be positive");
  if (c.node_budget == 0) throw ValidationError("node budget must be positive");
  if (c.threads < 1) throw ValidationError("threads must be at least 1");
  if (c.R0 < 0.0) c.R0 = default_r0(c);
  if (!std::isfinite(c.R0)) throw ValidationError("R0 must be finite");
  return c;
}

CodebookBundle::CodebookBundle(const SchemeConfig& config, double r0, std::uint64_t trial_seed)
    : n_(config.n),
      n1_(config.channel.x1_size()),
      n2_(config.channel.x2_size()),
      m1_(config.n * config.R1),
      m0_(std::floor(config.n * r0 + 1e-9)),
      x1_schedule_(bit_schedule(m1_.bits(), config.n, config.tail_fraction_x1)),
      x2_schedule_(bit_schedule(m0_.bits(), config.n, config.tail_fraction_x2)),
      x1_key_(mix(trial_seed, kTagX1)),
      x2_key_(mix(trial_seed, kTagX2)),
      bin_key_(mix(trial_seed, kTagBin)),
      p_x2_(n2_, 0.0),
      p_x1_given_x2_(static_cast<std::size_t>(n1_) * n2_, 0.0),
      bin_end_(config.n, 0) {
  // Bin bit j is fixed once position floor((j+1) n / K0) - 1 of Z is known.
  const int k0 = m0_.bits();
  for (int j = 0; j < k0; ++j) {
    const int tau = static_cast<int>((static_cast<long long>(j) + 1) * n_ / k0) - 1;
    ++bin_end_[std::max(tau, 0)];
  }
  for (int t = 1; t < n_; ++t) bin_end_[t] += bin_end_[t - 1];
  const auto& q = config.input_dist;
  if (q.size() != static_cast<std::size_t>(n1_) * n2_)
    throw ValidationError("input distribution does not match the channel's input alphabets");
  for (int a = 0; a < n1_; ++a)
    for (int b = 0; b < n2_; ++b) p_x2_[b] += q[a * n2_ + b];
  for (int b = 0; b < n2_; ++b)
    for (int a = 0; a < n1_; ++a)
      p_x1_given_x2_[b * n1_ + a] = p_x2_[b] > 0 ? q[a * n2_ + b] / p_x2_[b] : 1.0 / n1_;
}

std::uint64_t CodebookBundle::x1_key(const Bits& m0) const { return hash_bits(x1_key_, m0); }

std::vector<int> CodebookBundle::x2_codeword(const Bits& m0) const {
  if (!m0_.contains(m0)) throw ValidationError("bin index outside the m0 space");
  std::vector<int> x(n_);
  std::vector<std::uint64_t> h(m0.size() + 1);
  h[0] = x2_key_;
  for (std::size_t j = 0; j < m0.size(); ++j) h[j + 1] = extend_prefix(h[j], m0[j]);
  for (int t = 0; t < n_; ++t) x[t] = draw_symbol(h[x2_schedule_[t]], t, p_x2_);
  return x;
}

std::vector<int> CodebookBundle::x1_codeword(const Bits& m1, const Bits& m0,
                                             const std::vector<int>& x2) const {
  if (!m1_.contains(m1)) throw ValidationError("message outside the m1 space");
  if (x2.size() != static_cast<std::size_t>(n_)) throw ValidationError("x2 codeword length");
  std::vector<int> x(n_);
  std::vector<std::uint64_t> h(m1.size() + 1);
  h[0] = x1_key(m0);
  for (std::size_t j = 0; j < m1.size(); ++j) h[j + 1] = extend_prefix(h[j], m1[j]);
  for (int t = 0; t < n_; ++t) {
    const std::span<const double> law(p_x1_given_x2_.data() + x2[t] * n1_, n1_);
    x[t] = draw_symbol(h[x1_schedule_[t]], t, law);
  }
  return x;
}

std::vector<std::uint8_t> CodebookBundle::bin(const std::vector<int>& z) const {
  if (z.size() != static_cast<std::size_t>(n_)) throw ValidationError("Z sequence length");
  Bits out(m0_.bits());
  std::uint64_t h = bin_key_;
  int j = 0;
  for (int t = 0; t < n_; ++t) {
    h = extend_z(h, z[t]);
    for (; j < bin_end_[t]; ++j) out[j] = bin_bit(h, j);
  }
  return out;
}

namespace {

struct Track {
  const std::vector<int>* schedule;
  const Bits* max_bits;
  std::uint64_t key;
};

enum class SearchStatus { found, exhausted, overflow };

// A single-element message space leaves the decoder nothing to choose.
bool forced(const std::vector<Track>& tracks) {
  for (const auto& t : tracks)
    if (std::any_of(t.max_bits->begin(), t.max_bits->end(), [](auto b) { return b != 0; }))
      return false;
  return true;
}

struct Limits {
  std::vector<int> upper;
  std::vector<int> lower;
};

Limits cell_limits(const std::vector<double>& ref, int n, double eps) {
  Limits l{std::vector<int>(ref.size()), std::vector<int>(ref.size())};
  for (std::size_t a = 0; a < ref.size(); ++a) {
    const double e = n * ref[a];
    if (e <= 0.0) continue;
    const double slack = eps * e * (1.0 + 1e-12) + 1e-9;
    l.upper[a] = static_cast<int>(std::floor(e + slack));
    l.lower[a] = std::max(0, static_cast<int>(std::ceil(e - slack)));
  }
  return l;
}

// Depth-first search over tree-coded hypotheses in index order. `cell(t, h)`
// maps the prefix hashes in effect at position t to a joint-alphabet cell;
// a negative cell rejects the branch; `accept(bits)` is the final check at a leaf. Subtrees are cut as soon as a
// cell exceeds its upper count or the remaining positions cannot fill the
// lower counts.
template <class CellFn, class AcceptFn>
SearchStatus tree_search(int n, const std::vector<Track>& tracks, const Limits& lim,
                         std::uint64_t budget, CellFn&& cell, AcceptFn&& accept,
                         std::vector<Bits>& out) {
  const std::size_t nt = tracks.size();
  std::vector<Bits> bits(nt);
  if (forced(tracks)) {
    for (std::size_t k = 0; k < nt; ++k) bits[k].assign(tracks[k].max_bits->size(), 0);
    out = bits;
    return SearchStatus::found;
  }
  std::vector<std::vector<std::uint64_t>> hb(nt);
  for (std::size_t k = 0; k < nt; ++k) {
    bits[k].assign(tracks[k].max_bits->size(), 0);
    hb[k].assign(bits[k].size() + 1, 0);
    hb[k][0] = tracks[k].key;
  }
  std::vector<int> counts(lim.upper.size(), 0);
  int deficit = 0;
  for (int v : lim.lower) deficit += v;

  struct Frame {
    std::uint32_t v = 0;
    std::uint32_t end = 0;
    int cell = -1;
    std::uint32_t tight = 0;  // bit k: track k equals its max prefix so far
  };
  std::vector<Frame> st(n);
  std::vector<std::uint64_t> h_now(nt);
  auto new_bits = [&](std::size_t k, int t) {
    const auto& e = *tracks[k].schedule;
    return e[t] - (t == 0 ? 0 : e[t - 1]);
  };
  auto init = [&](int t, std::uint32_t tight) {
    int total = 0;
    for (std::size_t k = 0; k < nt; ++k) total += new_bits(k, t);
    st[t] = Frame{0, std::uint32_t{1} << total, -1, tight};
  };
  auto release = [&](int a) {
    --counts[a];
    if (counts[a] < lim.lower[a]) ++deficit;
  };

  std::uint64_t nodes = 0;
  init(0, (1U << nt) - 1);
  int t = 0;
  for (;;) {
    Frame& f = st[t];
    if (f.v >= f.end) {
      if (t == 0) return SearchStatus::exhausted;
      --t;
      release(st[t].cell);
      ++st[t].v;
      continue;
    }
    // Split v into per-track segments, high bits to track 0.
    int shift = 0;
    for (std::size_t k = 0; k < nt; ++k) shift += new_bits(k, t);
    bool valid = true;
    std::uint32_t child_tight = 0;
    for (std::size_t k = 0; k < nt && valid; ++k) {
      const int nb = new_bits(k, t);
      shift -= nb;
      const std::uint32_t seg = (f.v >> shift) & ((std::uint32_t{1} << nb) - 1);
      const int e0 = (*tracks[k].schedule)[t] - nb;
      const Bits& mx = *tracks[k].max_bits;
      std::uint32_t mseg = 0;
      for (int i = 0; i < nb; ++i) mseg = (mseg << 1) | mx[e0 + i];
      if (f.tight >> k & 1U) {
        if (seg > mseg) valid = false;
        else if (seg == mseg) child_tight |= 1U << k;
      }
      for (int i = 0; i < nb; ++i) {
        const auto b = static_cast<std::uint8_t>((seg >> (nb - 1 - i)) & 1U);
        bits[k][e0 + i] = b;
        hb[k][e0 + i + 1] = extend_prefix(hb[k][e0 + i], b);
      }
      h_now[k] = hb[k][(*tracks[k].schedule)[t]];
    }
    if (!valid) {
      ++f.v;
      continue;
    }
    if (++nodes > budget) return SearchStatus::overflow;
    const int a = cell(t, h_now);
    if (a < 0 || counts[a] + 1 > lim.upper[a]) {
      ++f.v;
      continue;
    }
    if (counts[a] < lim.lower[a]) --deficit;
    ++counts[a];
    if (deficit > n - (t + 1)) {
      release(a);
      ++f.v;
      continue;
    }
    f.cell = a;
    if (t + 1 == n) {
      if (accept(bits)) {
        out = bits;
        return SearchStatus::found;
      }
      release(a);
      ++f.v;
      continue;
    }
    ++t;
    init(t, child_tight);
  }
}

struct TrialOutcome {
  bool error = false;
  bool stage1 = false;
  bool overflow = false;
  bool atypical_truth = false;
  bool switch_ok = true;
  double decode_seconds = 0.0;
};

struct Context {
  SchemeConfig cfg;
  int n1, n2, nz, ne;
  std::vector<double> ref1;  // P(x2, yd)
  std::vector<double> ref2;  // P(x1, x2, z, yd)
  Limits lim1, lim2;
};

Context make_context(const SchemeConfig& cfg) {
  Context c{cfg, cfg.channel.x1_size(), cfg.channel.x2_size(), 0, cfg.channel.extended_y_size(),
            {}, {}, {}, {}};
  c.nz = c.n1 * c.n2 + 1;
  const auto j = decoder_joint(cfg.channel, cfg.input_dist, cfg.p);
  c.ref2 = j.mass();
  c.ref1 = j.marginal({"X2", "Yd"}).mass();
  c.lim1 = cell_limits(c.ref1, cfg.n, cfg.epsilon);
  c.lim2 = cell_limits(c.ref2, cfg.n, cfg.epsilon);
  return c;
}

int reconstruct_other(const MacChannel& ch, bool first_is_known, int known, int y) {
  int found = -1;
  const int other_size = first_is_known ? ch.x2_size() : ch.x1_size();
  for (int o = 0; o < other_size; ++o) {
    const double w = first_is_known ? ch(known, o, y) : ch(o, known, y);
    if (w > 0.0) {
      if (found >= 0) throw std::logic_error("encoder cannot resolve the other input from feedback");
      found = o;
    }
  }
  if (found < 0) throw std::logic_error("feedback output has zero probability");
  return found;
}

TrialOutcome block_markov_trial(const Context& ctx, std::uint64_t trial) {
  const auto& cfg = ctx.cfg;
  const Rng tr = Rng(cfg.seed).substream(trial);
  const CodebookBundle cb(cfg, cfg.R0, tr.seed());
  const int n = cfg.n, B = cfg.B, E = cfg.channel.erasure();
  const int zE = ctx.n1 * ctx.n2;
  TrialOutcome out;

  Rng msg_rng = tr.substream(kTagMsg);
  std::vector<Bits> m1(B), m0(B);
  for (int b = 0; b + 1 < B; ++b) m1[b] = cb.m1_space().uniform(msg_rng);
  m1[B - 1] = cb.m1_space().zero();
  m0[0] = cb.m0_space().zero();

  const SwitchedChannelInstance inst(cfg.channel, FeedforwardProfile::constant(cfg.p), n,
                                     tr.substream(kTagChannel).seed());
  std::vector<std::vector<int>> yd(B);
  std::uint64_t forward = 0;
  for (int b = 0; b < B; ++b) {
    const auto x2 = cb.x2_codeword(m0[b]);
    const auto x1 = cb.x1_codeword(m1[b], m0[b], x2);
    auto s = sample_block(inst, x1, x2, static_cast<std::uint64_t>(b));
    std::vector<int> z(n);
    for (int t = 0; t < n; ++t) {
      forward += s.v[t];
      const int truth = s.v[t] ? zE : x1[t] * ctx.n2 + x2[t];
      int z1 = zE, z2 = zE;
      if (s.y_e[t] != E) {
        z1 = x1[t] * ctx.n2 + reconstruct_other(cfg.channel, true, x1[t], s.y_e[t]);
        z2 = reconstruct_other(cfg.channel, false, x2[t], s.y_e[t]) * ctx.n2 + x2[t];
      }
      if (z1 != truth || z2 != truth)
        throw std::logic_error("encoder reconstruction of the shared sequence disagrees with truth");
      z[t] = truth;
    }
    if (b + 1 < B) m0[b + 1] = cb.bin(z);
    // Diagnostic: is the true tuple typical for the stage-2 test?
    std::vector<int> counts(ctx.ref2.size(), 0);
    for (int t = 0; t < n; ++t) ++counts[((x1[t] * ctx.n2 + x2[t]) * ctx.nz + z[t]) * ctx.ne + s.y_d[t]];
    if (!counts_robustly_typical(counts, ctx.ref2, n, cfg.epsilon)) out.atypical_truth = true;
    yd[b] = std::move(s.y_d);
  }
  const double frac = static_cast<double>(forward) / (static_cast<double>(n) * B);
  out.switch_ok = std::abs(frac - cfg.p) <= 0.25;

  const auto t0 = std::chrono::steady_clock::now();
  const auto& law2 = cb.p_x2();
  std::optional<Bits> m0_prev = cb.m0_space().zero();
  for (int b = 1; b < B && !out.error; ++b) {
    // Stage 1: smallest bin index whose x2 codeword is typical with yd(b).
    const std::vector<int>& y1 = yd[b];
    std::vector<Track> tr1{{&cb.x2_schedule(), &cb.m0_space().max_message(), cb.x2_key()}};
    std::vector<Bits> found;
    const auto s1 = tree_search(
        n, tr1, ctx.lim1, cfg.node_budget,
        [&](int t, const std::vector<std::uint64_t>& h) {
          return draw_symbol(h[0], t, law2) * ctx.ne + y1[t];
        },
        [](const std::vector<Bits>&) { return true; }, found);
    if (s1 == SearchStatus::overflow) out.overflow = true;
    std::optional<Bits> m0_hat;
    if (s1 == SearchStatus::found) m0_hat = found[0];
    const bool stage1_ok = m0_hat == m0[b];

    // Stage 2: smallest m1 whose codeword, with the decoded x2 and the implied
    // shared sequence, is typical with yd(b-1) and hashes to m0_hat.
    std::optional<Bits> m1_hat;
    if (m0_hat && m0_prev) {
      const auto x2 = cb.x2_codeword(*m0_prev);
      const std::vector<int>& y2 = yd[b - 1];
      const auto& law1 = cb.p_x1_given_x2();
      const auto& bin_end = cb.bin_end();
      const Bits& target = *m0_hat;
      std::vector<std::uint64_t> hz(n + 1);
      hz[0] = cb.bin_key();
      std::vector<Track> tr2{{&cb.x1_schedule(), &cb.m1_space().max_message(), cb.x1_key(*m0_prev)}};
      const auto s2 = tree_search(
          n, tr2, ctx.lim2, cfg.node_budget,
          [&](int t, const std::vector<std::uint64_t>& h) {
            const std::span<const double> law(law1.data() + x2[t] * ctx.n1, ctx.n1);
            const int a = draw_symbol(h[0], t, law);
            const int z = y2[t] != E ? zE : a * ctx.n2 + x2[t];
            hz[t + 1] = CodebookBundle::extend_z(hz[t], z);
            for (int j = t ? bin_end[t - 1] : 0; j < bin_end[t]; ++j)
              if (CodebookBundle::bin_bit(hz[t + 1], j) != target[j]) return -1;
            return ((a * ctx.n2 + x2[t]) * ctx.nz + z) * ctx.ne + y2[t];
          },
          [](const std::vector<Bits>&) { return true; }, found);
      if (s2 == SearchStatus::overflow) out.overflow = true;
      if (s2 == SearchStatus::found) m1_hat = found[0];
    }
    if (m1_hat != m1[b - 1]) {
      out.error = true;
      out.stage1 = !stage1_ok;
    }
    m0_prev = m0_hat;
  }
  out.decode_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

struct BaselineContext {
  SchemeConfig cfg;
  int n1, n2, ne;
  std::vector<double> p1, p2;
  std::vector<double> ref;  // P(x1) P(x2) over (x1, x2, yd)
  Limits lim;
};

BaselineContext make_baseline_context(const SchemeConfig& cfg) {
  BaselineContext c{cfg, cfg.channel.x1_size(), cfg.channel.x2_size(),
                    cfg.channel.extended_y_size(), {}, {}, {}, {}};
  c.p1.assign(c.n1, 0.0);
  c.p2.assign(c.n2, 0.0);
  for (int a = 0; a < c.n1; ++a)
    for (int b = 0; b < c.n2; ++b) {
      c.p1[a] += cfg.input_dist[a * c.n2 + b];
      c.p2[b] += cfg.input_dist[a * c.n2 + b];
    }
  std::vector<double> prod(static_cast<std::size_t>(c.n1) * c.n2);
  for (int a = 0; a < c.n1; ++a)
    for (int b = 0; b < c.n2; ++b) prod[a * c.n2 + b] = c.p1[a] * c.p2[b];
  c.ref = decoder_joint(cfg.channel, prod, cfg.p).marginal({"X1", "X2", "Yd"}).mass();
  c.lim = cell_limits(c.ref, cfg.n, cfg.epsilon);
  return c;
}

TrialOutcome baseline_trial(const BaselineContext& ctx, std::uint64_t trial) {
  const auto& cfg = ctx.cfg;
  const int n = cfg.n;
  const Rng tr = Rng(cfg.seed).substream(trial);
  const MessageSpace s1(n * cfg.R1), s2(n * cfg.R2);
  const auto e1 = bit_schedule(s1.bits(), n, cfg.tail_fraction_x2);
  const auto e2 = bit_schedule(s2.bits(), n, cfg.tail_fraction_x2);
  for (int t = 0; t < n; ++t)
    if (e1[t] - (t ? e1[t - 1] : 0) + e2[t] - (t ? e2[t - 1] : 0) > kMaxBitsPerPosition)
      throw ResourceError("more than 16 message bits per codeword position; reduce the rates");
  const std::uint64_t k1 = mix(tr.seed(), kTagX1), k2 = mix(tr.seed(), kTagX2);
  Rng msg_rng = tr.substream(kTagMsg);
  const Bits m1 = s1.uniform(msg_rng), m2 = s2.uniform(msg_rng);

  auto codeword = [&](std::uint64_t key, const Bits& m, const std::vector<int>& e,
                      const std::vector<double>& law) {
    std::vector<std::uint64_t> h(m.size() + 1);
    h[0] = key;
    for (std::size_t j = 0; j < m.size(); ++j) h[j + 1] = extend_prefix(h[j], m[j]);
    std::vector<int> x(n);
    for (int t = 0; t < n; ++t) x[t] = draw_symbol(h[e[t]], t, law);
    return x;
  };
  const auto x1 = codeword(k1, m1, e1, ctx.p1);
  const auto x2 = codeword(k2, m2, e2, ctx.p2);
  const SwitchedChannelInstance inst(cfg.channel, FeedforwardProfile::constant(cfg.p), n,
                                     tr.substream(kTagChannel).seed());
  const auto s = sample_block(inst, x1, x2, std::uint64_t{0});
  TrialOutcome out;
  std::uint64_t forward = 0;
  for (auto v : s.v) forward += v;
  out.switch_ok = std::abs(static_cast<double>(forward) / n - cfg.p) <= 0.25;

  const auto t0 = std::chrono::steady_clock::now();
  std::vector<Track> tracks{{&e1, &s1.max_message(), k1}, {&e2, &s2.max_message(), k2}};
  std::vector<Bits> found;
  const auto st = tree_search(
      n, tracks, ctx.lim, cfg.node_budget,
      [&](int t, const std::vector<std::uint64_t>& h) {
        const int a = draw_symbol(h[0], t, ctx.p1), b = draw_symbol(h[1], t, ctx.p2);
        return (a * ctx.n2 + b) * ctx.ne + s.y_d[t];
      },
      [](const std::vector<Bits>&) { return true; }, found);
  out.overflow = st == SearchStatus::overflow;
  out.error = !(st == SearchStatus::found && found[0] == m1 && found[1] == m2);
  out.decode_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

template <class TrialFn>
SimReport run_trials(std::uint64_t trials, int threads, TrialFn&& fn) {
  if (trials == 0) throw ValidationError("trials must be at least 1");
  const int workers = static_cast<int>(std::min<std::uint64_t>(std::max(threads, 1), trials));
  std::vector<SimReport> partial(workers);
  std::vector<double> seconds(workers, 0.0);
  std::vector<std::exception_ptr> failures(workers);
  auto work = [&](int w) {
    try {
      for (std::uint64_t i = w; i < trials; i += workers) {
        const TrialOutcome o = fn(i);
        auto& r = partial[w];
        ++r.trials;
        r.errors += o.error;
        r.stage1_errors += o.error && o.stage1;
        r.stage2_errors += o.error && !o.stage1;
        r.search_overflows += o.overflow;
        r.atypical_truth += o.atypical_truth;
        r.switch_fraction_ok += o.switch_ok;
        ++r.switch_fraction_checked;
        seconds[w] += o.decode_seconds;
      }
    } catch (...) {
      failures[w] = std::current_exception();
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& th : pool) th.join();
  }
  for (auto& f : failures)
    if (f) std::rethrow_exception(f);
  SimReport r;
  double total_seconds = 0.0;
  for (int w = 0; w < workers; ++w) {
    const auto& p = partial[w];
    r.trials += p.trials;
    r.errors += p.errors;
    r.stage1_errors += p.stage1_errors;
    r.stage2_errors += p.stage2_errors;
    r.search_overflows += p.search_overflows;
    r.atypical_truth += p.atypical_truth;
    r.switch_fraction_ok += p.switch_fraction_ok;
    r.switch_fraction_checked += p.switch_fraction_checked;
    total_seconds += seconds[w];
  }
  r.error_rate = static_cast<double>(r.errors) / static_cast<double>(r.trials);
  std::tie(r.ci_low, r.ci_high) = clopper_pearson(r.errors, r.trials);
  r.mean_decode_seconds = total_seconds / static_cast<double>(r.trials);
  return r;
}

}  // namespace

SimReport run_block_markov(const SchemeConfig& config, std::uint64_t trials) {
  const SchemeConfig cfg = resolve_config(config);
  if (cfg.p < 1.0) {
    const auto cc = theorem1_class_check(cfg.channel);
    if (!cc.holds)
      throw ValidationError("encoders cannot reconstruct the shared sequence: " + cc.describe());
  }
  const Context ctx = make_context(cfg);
  // Fail early on rate limits before spawning workers.
  const CodebookBundle probe(cfg, cfg.R0, 0);
  SimReport r = run_trials(trials, cfg.threads,
                           [&](std::uint64_t i) { return block_markov_trial(ctx, i); });
  r.effective_rate = (cfg.B - 1) * probe.m1_space().log2_size() / (static_cast<double>(cfg.n) * cfg.B);
  r.r0_used = probe.m0_space().log2_size() / cfg.n;
  return r;
}

SimReport run_no_feedback_baseline(const SchemeConfig& config, std::uint64_t trials) {
  const SchemeConfig cfg = resolve_config(config);
  const BaselineContext ctx = make_baseline_context(cfg);
  const MessageSpace s1(cfg.n * cfg.R1), s2(cfg.n * cfg.R2);
  SimReport r = run_trials(trials, cfg.threads,
                           [&](std::uint64_t i) { return baseline_trial(ctx, i); });
  r.effective_rate = (s1.log2_size() + s2.log2_size()) / cfg.n;
  return r;
}

SweepAxis parse_axis(const std::string& s) {
  if (s == "n") return SweepAxis::n;
  if (s == "p") return SweepAxis::p;
  if (s == "R1") return SweepAxis::R1;
  throw ValidationError("sweep axis must be one of n, p, R1");
}

Scheme parse_scheme(const std::string& s) {
  if (s == "block-markov") return Scheme::block_markov;
  if (s == "baseline") return Scheme::baseline;
  throw ValidationError("scheme must be block-markov or baseline");
}

std::vector<SweepRow> sweep(const SchemeConfig& base, SweepAxis axis,
                            const std::vector<double>& values, std::uint64_t trials,
                            Scheme scheme) {
  if (values.empty()) throw ValidationError("sweep needs at least one value");
  bool up = true, down = true;
  for (std::size_t i = 1; i < values.size(); ++i) {
    up = up && values[i] > values[i - 1];
    down = down && values[i] < values[i - 1];
  }
  if (!up && !down) throw ValidationError("sweep values must be strictly monotone");
  std::vector<SweepRow> rows;
  for (double v : values) {
    SchemeConfig c = base;
    switch (axis) {
      case SweepAxis::n:
        if (v != std::floor(v) || v < 1) throw ValidationError("n values must be positive integers");
        c.n = static_cast<int>(v);
        break;
      case SweepAxis::p: c.p = v; break;
      case SweepAxis::R1: c.R1 = v; break;
    }
    rows.push_back({v, scheme == Scheme::block_markov ? run_block_markov(c, trials)
                                                      : run_no_feedback_baseline(c, trials)});
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows, std::uint64_t seed) {
  std::ostringstream os;
  os << "axis_value,trials,errors,error_rate,ci_low,ci_high,stage1_errors,stage2_errors,seed\n";
  char buf[256];
  for (const auto& row : rows) {
    const auto& r = row.report;
    std::snprintf(buf, sizeof buf, "%.6f,%llu,%llu,%.6f,%.6f,%.6f,%llu,%llu,%llu\n", row.axis_value,
                  static_cast<unsigned long long>(r.trials), static_cast<unsigned long long>(r.errors),
                  r.error_rate, r.ci_low, r.ci_high,
                  static_cast<unsigned long long>(r.stage1_errors),
                  static_cast<unsigned long long>(r.stage2_errors),
                  static_cast<unsigned long long>(seed));
    os << buf;
  }
  return os.str();
}

}  // namespace swfb
