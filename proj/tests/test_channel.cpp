#include <cmath>

#include "doctest.h"
#include "swfb/channel.hpp"
#include "swfb/errors.hpp"

using namespace swfb;

TEST_CASE("switch probabilities follow segment overlaps") {
  auto c = compute_switch_probs(FeedforwardProfile::constant(0.5), 4);
  CHECK(c == std::vector<double>{0.5, 0.5, 0.5, 0.5});

  const FeedforwardProfile step({{0.0, 0.5, 0.0}, {0.5, 1.0, 1.0}});
  CHECK(compute_switch_probs(step, 2) == std::vector<double>{0.0, 1.0});
  auto three = compute_switch_probs(step, 3);
  REQUIRE(three.size() == 3);
  CHECK(three[0] == 0.0);
  CHECK(three[1] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(three[2] == 1.0);

  // Mean over uses equals p_avg when n is a multiple of the breakpoint denominators.
  const FeedforwardProfile prof({{0.0, 0.25, 0.3}, {0.25, 0.75, 0.9}, {0.75, 1.0, 0.1}});
  auto p = compute_switch_probs(prof, 8);
  double mean = 0.0;
  for (double v : p) mean += v / 8.0;
  CHECK(mean == doctest::Approx(0.25 * 0.3 + 0.5 * 0.9 + 0.25 * 0.1).epsilon(1e-14));
  CHECK(prof.average() == doctest::Approx(0.55).epsilon(1e-14));
}

TEST_CASE("invalid profiles are rejected") {
  CHECK_THROWS_AS(FeedforwardProfile({{0.0, 0.4, 0.2}, {0.5, 1.0, 0.3}}), ValidationError);
  CHECK_THROWS_AS(FeedforwardProfile({{0.0, 0.6, 0.2}, {0.5, 1.0, 0.3}}), ValidationError);
  CHECK_THROWS_AS(FeedforwardProfile({{0.1, 1.0, 0.2}}), ValidationError);
  CHECK_THROWS_AS(FeedforwardProfile({{0.0, 1.0, 1.2}}), ValidationError);
  CHECK_THROWS_AS(compute_switch_probs(FeedforwardProfile::constant(0.5), 0), ValidationError);
}

TEST_CASE("step and block profiles") {
  auto s = FeedforwardProfile::step(0.25);
  CHECK(s.average() == doctest::Approx(0.25));
  CHECK(s.segments().front().p == 0.0);
  const double blocks[] = {0.0, 1.0, 0.5, 0.5};
  auto b = FeedforwardProfile::from_blocks(blocks);
  CHECK(compute_switch_probs(b, 4) == std::vector<double>{0.0, 1.0, 0.5, 0.5});
}

TEST_CASE("sample_block switch semantics") {
  const int n = 64;
  std::vector<int> x1(n), x2(n);
  for (int i = 0; i < n; ++i) {
    x1[i] = i % 2;
    x2[i] = (i / 2) % 2;
  }
  const auto xorc = make_binary_xor();
  SwitchedChannelInstance on(xorc, FeedforwardProfile::constant(1.0), n, 7);
  auto s = sample_block(on, x1, x2, std::uint64_t{0});
  for (int i = 0; i < n; ++i) {
    CHECK(s.y_d[i] == (x1[i] ^ x2[i]));
    CHECK(s.y_e[i] == xorc.erasure());
  }
  SwitchedChannelInstance off(xorc, FeedforwardProfile::constant(0.0), n, 7);
  auto t = sample_block(off, x1, x2, std::uint64_t{0});
  for (int i = 0; i < n; ++i) {
    CHECK(t.y_d[i] == xorc.erasure());
    CHECK(t.y_e[i] == (x1[i] ^ x2[i]));
  }
  std::vector<int> bad(x1);
  bad[3] = 2;
  CHECK_THROWS_AS(sample_block(on, bad, x2, std::uint64_t{0}), ValidationError);
  CHECK_THROWS_AS(sample_block(on, std::span(x1).first(3), x2, std::uint64_t{0}), ValidationError);
}

TEST_CASE("sample_block fraction of feedforward uses and reproducibility") {
  const int n = 100000;
  std::vector<int> x1(n, 1), x2(n, 0);
  SwitchedChannelInstance inst(make_binary_adder(), FeedforwardProfile::constant(0.7), n, 99);
  auto s = sample_block(inst, x1, x2, std::uint64_t{3});
  int fed = 0;
  for (int i = 0; i < n; ++i) {
    fed += s.y_d[i] != 3;
    // Exactly one side is erased.
    CHECK(((s.y_d[i] == 3) != (s.y_e[i] == 3)));
  }
  CHECK(std::abs(fed / double(n) - 0.7) <= 0.01);
  auto again = sample_block(inst, x1, x2, std::uint64_t{3});
  CHECK(again.y_d == s.y_d);
  CHECK(again.v == s.v);
}

TEST_CASE("noisy channel sampling matches the row law") {
  const MacChannel bsc(1, 1, 2, {0.8, 0.2});
  const int n = 50000;
  std::vector<int> z(n, 0);
  SwitchedChannelInstance inst(bsc, FeedforwardProfile::constant(1.0), n, 5);
  auto s = sample_block(inst, z, z, std::uint64_t{0});
  int ones = 0;
  for (int y : s.y_raw) ones += y;
  CHECK(std::abs(ones / double(n) - 0.2) < 0.01);
}

TEST_CASE("channel documents") {
  const auto adder = make_binary_adder();
  nlohmann::json doc = {{"x1_size", 2},
                        {"x2_size", 2},
                        {"y_size", 3},
                        {"transition",
                         {{{1, 0, 0}, {0, 1, 0}}, {{0, 1, 0}, {0, 0, 1}}}}};
  CHECK(load_channel(doc) == adder);
  CHECK(load_channel(channel_to_json(adder)) == adder);

  auto bad = doc;
  bad["transition"][0][0] = {0.9, 0.0, 0.0};
  CHECK_THROWS_AS(load_channel(bad), ValidationError);

  auto near = doc;
  near["transition"][0][0] = {0.5, 0.5 + 5e-10, 0.0};
  const auto ch = load_channel(near);
  CHECK(ch(0, 0, 0) + ch(0, 0, 1) == doctest::Approx(1.0).epsilon(1e-15));

  auto shape = doc;
  shape["transition"][1] = {{1, 0, 0}};
  CHECK_THROWS_AS(load_channel(shape), ValidationError);
  CHECK_THROWS_AS(load_channel(nlohmann::json{{"x1_size", 2}}), ValidationError);
  CHECK_THROWS_AS(MacChannel(2, 2, 3, {1.0}), ValidationError);
}

TEST_CASE("profile documents round trip") {
  const FeedforwardProfile p({{0.0, 0.3, 0.1}, {0.3, 1.0, 0.9}});
  CHECK(load_profile(profile_to_json(p)) == p);
  CHECK_THROWS_AS(load_profile(nlohmann::json{{"t_start", 0}}), ValidationError);
}
