#include "swfb/channel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "swfb/errors.hpp"

namespace swfb {

namespace {

constexpr double kRowTolerance = 1e-12;
constexpr double kIngestTolerance = 1e-9;
constexpr double kBoundaryTolerance = 1e-12;

void check_sizes(int x1_size, int x2_size, int y_size) {
  if (x1_size < 1 || x2_size < 1 || y_size < 1)
    throw ValidationError("channel alphabet sizes must be >= 1");
}

}  // namespace

MacChannel::MacChannel(int x1_size, int x2_size, int y_size, std::vector<double> transition)
    : x1_size_(x1_size), x2_size_(x2_size), y_size_(y_size), transition_(std::move(transition)) {
  check_sizes(x1_size, x2_size, y_size);
  const std::size_t cells =
      static_cast<std::size_t>(x1_size) * static_cast<std::size_t>(x2_size) * y_size;
  if (transition_.size() != cells)
    throw ValidationError("transition table has " + std::to_string(transition_.size()) +
                          " entries, expected " + std::to_string(cells));
  for (int x = 0; x < input_count(); ++x) {
    double sum = 0.0;
    for (double w : row(x)) {
      if (!(w >= 0.0) || !std::isfinite(w)) throw ValidationError("transition entry not in [0,1]");
      sum += w;
    }
    if (std::abs(sum - 1.0) > kRowTolerance)
      throw ValidationError("transition row " + std::to_string(x) + " sums to " +
                            std::to_string(sum));
  }
}

MacChannel MacChannel::deterministic(int x1_size, int x2_size, int y_size,
                                     const std::function<int(int, int)>& f) {
  check_sizes(x1_size, x2_size, y_size);
  std::vector<double> t(static_cast<std::size_t>(x1_size) * x2_size * y_size, 0.0);
  for (int a = 0; a < x1_size; ++a)
    for (int b = 0; b < x2_size; ++b) {
      const int y = f(a, b);
      if (y < 0 || y >= y_size) throw ValidationError("deterministic map leaves output alphabet");
      t[(static_cast<std::size_t>(a) * x2_size + b) * y_size + y] = 1.0;
    }
  return MacChannel(x1_size, x2_size, y_size, std::move(t));
}

MacChannel make_binary_adder() {
  return MacChannel::deterministic(2, 2, 3, [](int a, int b) { return a + b; });
}

MacChannel make_binary_xor() {
  return MacChannel::deterministic(2, 2, 2, [](int a, int b) { return a ^ b; });
}

MacChannel make_first_input_identity(int size) {
  return MacChannel::deterministic(size, size, size, [](int a, int) { return a; });
}

FeedforwardProfile::FeedforwardProfile(std::vector<ProfileSegment> segments)
    : segments_(std::move(segments)) {
  if (segments_.empty()) throw ValidationError("profile has no segments");
  if (std::abs(segments_.front().t_start) > kBoundaryTolerance)
    throw ValidationError("profile must start at t = 0");
  if (std::abs(segments_.back().t_end - 1.0) > kBoundaryTolerance)
    throw ValidationError("profile must end at t = 1");
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const auto& s = segments_[i];
    if (!(s.t_end > s.t_start)) throw ValidationError("profile segment has nonpositive length");
    if (!(s.p >= 0.0 && s.p <= 1.0)) throw ValidationError("profile probability outside [0,1]");
    if (i > 0 && std::abs(s.t_start - segments_[i - 1].t_end) > kBoundaryTolerance)
      throw ValidationError("profile segments leave a gap or overlap at t = " +
                            std::to_string(s.t_start));
  }
  segments_.front().t_start = 0.0;
  segments_.back().t_end = 1.0;
  for (std::size_t i = 1; i < segments_.size(); ++i) segments_[i].t_start = segments_[i - 1].t_end;
}

FeedforwardProfile FeedforwardProfile::constant(double p) {
  return FeedforwardProfile({{0.0, 1.0, p}});
}

FeedforwardProfile FeedforwardProfile::step(double p_avg) {
  if (!(p_avg >= 0.0 && p_avg <= 1.0)) throw ValidationError("p_avg outside [0,1]");
  if (p_avg == 0.0) return constant(0.0);
  if (p_avg == 1.0) return constant(1.0);
  return FeedforwardProfile({{0.0, 1.0 - p_avg, 0.0}, {1.0 - p_avg, 1.0, 1.0}});
}

FeedforwardProfile FeedforwardProfile::from_blocks(std::span<const double> block_values) {
  if (block_values.empty()) throw ValidationError("profile needs at least one block");
  const double B = static_cast<double>(block_values.size());
  std::vector<ProfileSegment> segs;
  for (std::size_t b = 0; b < block_values.size(); ++b)
    segs.push_back({b / B, (b + 1) / B, block_values[b]});
  segs.back().t_end = 1.0;
  return FeedforwardProfile(std::move(segs));
}

double FeedforwardProfile::integral(double a, double b) const {
  double total = 0.0;
  for (const auto& s : segments_) {
    const double lo = std::max(a, s.t_start);
    const double hi = std::min(b, s.t_end);
    if (hi > lo) total += (hi - lo) * s.p;
  }
  return total;
}

double FeedforwardProfile::average() const { return integral(0.0, 1.0); }

std::vector<double> compute_switch_probs(const FeedforwardProfile& profile, int n) {
  if (n < 1) throw ValidationError("blocklength must be >= 1");
  std::vector<double> out(static_cast<std::size_t>(n));
  const auto& segs = profile.segments();
  for (int i = 0; i < n; ++i) {
    const double a = static_cast<double>(i) / n;
    const double b = static_cast<double>(i + 1) / n;
    bool covered = false;
    for (const auto& s : segs) {
      if (s.t_start <= a && b <= s.t_end) {
        out[i] = s.p;
        covered = true;
        break;
      }
    }
    if (!covered) out[i] = std::clamp(n * profile.integral(a, b), 0.0, 1.0);
  }
  return out;
}

SwitchedChannelInstance::SwitchedChannelInstance(MacChannel ch, FeedforwardProfile prof, int len,
                                                 std::uint64_t s)
    : channel(std::move(ch)),
      profile(std::move(prof)),
      n(len),
      switch_probs(compute_switch_probs(profile, len)),
      seed(s) {}

BlockSample sample_block(const SwitchedChannelInstance& instance, std::span<const int> x1,
                         std::span<const int> x2, Rng& stream) {
  const auto& ch = instance.channel;
  const std::size_t n = static_cast<std::size_t>(instance.n);
  if (x1.size() != n || x2.size() != n)
    throw ValidationError("input sequences must have length n = " + std::to_string(n));
  BlockSample out;
  out.y_raw.resize(n);
  out.y_d.resize(n);
  out.y_e.resize(n);
  out.v.resize(n);
  const int e = ch.erasure();
  for (std::size_t i = 0; i < n; ++i) {
    if (x1[i] < 0 || x1[i] >= ch.x1_size() || x2[i] < 0 || x2[i] >= ch.x2_size())
      throw ValidationError("input symbol out of range at position " + std::to_string(i));
    const int y = stream.categorical(ch.row(x1[i], x2[i]));
    const bool v = stream.bernoulli(instance.switch_probs[i]);
    out.y_raw[i] = y;
    out.v[i] = v ? 1 : 0;
    out.y_d[i] = v ? y : e;
    out.y_e[i] = v ? e : y;
  }
  return out;
}

BlockSample sample_block(const SwitchedChannelInstance& instance, std::span<const int> x1,
                         std::span<const int> x2, std::uint64_t block_index) {
  Rng stream = Rng(instance.seed).substream(block_index);
  return sample_block(instance, x1, x2, stream);
}

MacChannel load_channel(const nlohmann::json& doc) {
  try {
    const int a = doc.at("x1_size").get<int>();
    const int b = doc.at("x2_size").get<int>();
    const int c = doc.at("y_size").get<int>();
    check_sizes(a, b, c);
    const auto& t = doc.at("transition");
    if (!t.is_array() || static_cast<int>(t.size()) != a)
      throw ValidationError("transition must have x1_size rows");
    std::vector<double> table;
    table.reserve(static_cast<std::size_t>(a) * b * c);
    for (int i = 0; i < a; ++i) {
      if (!t[i].is_array() || static_cast<int>(t[i].size()) != b)
        throw ValidationError("transition[" + std::to_string(i) + "] must have x2_size rows");
      for (int j = 0; j < b; ++j) {
        const auto& r = t[i][j];
        if (!r.is_array() || static_cast<int>(r.size()) != c)
          throw ValidationError("transition row length must equal y_size");
        double sum = 0.0;
        const std::size_t start = table.size();
        for (int k = 0; k < c; ++k) {
          const double w = r[k].get<double>();
          if (!(w >= 0.0 && w <= 1.0)) throw ValidationError("transition entry not in [0,1]");
          table.push_back(w);
          sum += w;
        }
        if (std::abs(sum - 1.0) > kIngestTolerance)
          throw ValidationError("transition row (" + std::to_string(i) + "," +
                                std::to_string(j) + ") sums to " + std::to_string(sum));
        for (std::size_t k = start; k < table.size(); ++k) table[k] /= sum;
      }
    }
    return MacChannel(a, b, c, std::move(table));
  } catch (const nlohmann::json::exception& ex) {
    throw ValidationError(std::string("malformed channel document: ") + ex.what());
  }
}

nlohmann::json channel_to_json(const MacChannel& channel) {
  nlohmann::json t = nlohmann::json::array();
  for (int i = 0; i < channel.x1_size(); ++i) {
    nlohmann::json rows = nlohmann::json::array();
    for (int j = 0; j < channel.x2_size(); ++j) {
      auto r = channel.row(i, j);
      rows.push_back(std::vector<double>(r.begin(), r.end()));
    }
    t.push_back(std::move(rows));
  }
  return {{"x1_size", channel.x1_size()},
          {"x2_size", channel.x2_size()},
          {"y_size", channel.y_size()},
          {"transition", std::move(t)}};
}

FeedforwardProfile load_profile(const nlohmann::json& doc) {
  try {
    if (!doc.is_array()) throw ValidationError("profile document must be an array");
    std::vector<ProfileSegment> segs;
    for (const auto& s : doc)
      segs.push_back(
          {s.at("t_start").get<double>(), s.at("t_end").get<double>(), s.at("p").get<double>()});
    return FeedforwardProfile(std::move(segs));
  } catch (const nlohmann::json::exception& ex) {
    throw ValidationError(std::string("malformed profile document: ") + ex.what());
  }
}

nlohmann::json profile_to_json(const FeedforwardProfile& profile) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& s : profile.segments())
    out.push_back({{"t_start", s.t_start}, {"t_end", s.t_end}, {"p", s.p}});
  return out;
}

namespace {

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& ex) {
    throw ValidationError(path + ": " + ex.what());
  }
}

}  // namespace

MacChannel load_channel_file(const std::string& path) {
  return load_channel(read_json_file(path));
}

FeedforwardProfile load_profile_file(const std::string& path) {
  return load_profile(read_json_file(path));
}

}  // namespace swfb
