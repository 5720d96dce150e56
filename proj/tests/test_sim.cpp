#include <algorithm>
#include <cmath>
#include <set>

#include "doctest.h"
#include "swfb/errors.hpp"
#include "swfb/sim.hpp"

using namespace swfb;

namespace {

// Upper-tail binomial probability P(X >= k), X ~ Bin(n, q), summed directly.
double binom_upper_tail(int k, int n, double q) {
  double s = 0.0;
  for (int i = k; i <= n; ++i)
    s += std::exp(std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0) +
                  i * std::log(q) + (n - i) * std::log1p(-q));
  return s;
}

// Tabulated chi-square critical values at the 0.01 level.
constexpr double kChi2Df11 = 24.725;
constexpr double kChi2Df15 = 30.578;

SchemeConfig adder_config(int n, double r1) {
  SchemeConfig c;
  c.channel = make_binary_adder();
  c.p = 0.5;
  c.n = n;
  c.B = 4;
  c.R1 = r1;
  c.input_dist = dsbs(1.0 / 3);
  c.seed = 11;
  return c;
}

std::uint64_t to_int(const std::vector<std::uint8_t>& bits) {
  std::uint64_t v = 0;
  for (auto b : bits) v = (v << 1) | b;
  return v;
}

}  // namespace

TEST_CASE("message spaces") {
  CHECK(MessageSpace(0.0).bits() == 0);
  CHECK(MessageSpace(0.0).log2_size() == 0.0);
  const MessageSpace s16(4.0);
  CHECK(s16.bits() == 4);
  CHECK(to_int(s16.max_message()) == 15);
  // ceil(2^3.5) = 12
  const MessageSpace s12(3.5);
  CHECK(to_int(s12.max_message()) == 11);
  CHECK(s12.contains({1, 0, 1, 1}));
  CHECK_FALSE(s12.contains({1, 1, 0, 0}));
  CHECK(MessageSpace(100.0).bits() == 100);
  CHECK(MessageSpace(123.6).bits() == 124);
  CHECK_THROWS_AS(MessageSpace(-1.0), ValidationError);
  CHECK_THROWS_AS(MessageSpace(5000.0), ResourceError);

  Rng rng(3);
  std::vector<int> hist(12, 0);
  const int draws = 12000;
  for (int i = 0; i < draws; ++i) ++hist[to_int(s12.uniform(rng))];
  double chi2 = 0.0;
  for (int h : hist) chi2 += (h - 1000.0) * (h - 1000.0) / 1000.0;
  CHECK(chi2 < kChi2Df11);
}

TEST_CASE("clopper-pearson interval") {
  // Closed forms at the edges.
  auto [lo0, hi0] = clopper_pearson(0, 10);
  CHECK(lo0 == 0.0);
  CHECK(hi0 == doctest::Approx(1 - std::pow(0.025, 0.1)).epsilon(1e-9));
  auto [loN, hiN] = clopper_pearson(10, 10);
  CHECK(hiN == 1.0);
  CHECK(loN == doctest::Approx(std::pow(0.025, 0.1)).epsilon(1e-9));
  // Interior: the bounds solve the binomial tail equations.
  const int k = 37, n = 200;
  auto [lo, hi] = clopper_pearson(k, n);
  CHECK(binom_upper_tail(k, n, lo) == doctest::Approx(0.025).epsilon(1e-6));
  CHECK(1.0 - binom_upper_tail(k + 1, n, hi) == doctest::Approx(0.025).epsilon(1e-6));
  CHECK(lo < k / 200.0);
  CHECK(hi > k / 200.0);
  CHECK_THROWS_AS(clopper_pearson(0, 0), ValidationError);
}

TEST_CASE("bit schedule") {
  const auto e = bit_schedule(57, 120, 0.125);
  CHECK(e.size() == 120);
  CHECK(std::is_sorted(e.begin(), e.end()));
  const int active = 120 - 15;
  CHECK(e[active - 1] == 57);
  CHECK(e[active - 3] < 57);
  CHECK(e.back() == 57);
  for (int t = 0; t < 120; ++t) CHECK(e[t] - (t ? e[t - 1] : 0) <= 1);
  CHECK(bit_schedule(0, 10, 0.2) == std::vector<int>(10, 0));
  CHECK_THROWS_AS(bit_schedule(200, 12, 0.0), ResourceError);
  CHECK_THROWS_AS(bit_schedule(4, 12, 1.0), ValidationError);
}

TEST_CASE("single-codeword books decode on a noiseless channel") {
  SchemeConfig c;
  c.channel = make_first_input_identity();
  c.p = 1.0;
  c.n = 16;
  c.B = 3;
  c.R1 = 0.0;
  c.R0 = 0.0;
  const CodebookBundle cb(resolve_config(c), 0.0, 5);
  CHECK(cb.m1_space().bits() == 0);
  CHECK(cb.m0_space().bits() == 0);
  const auto r = run_block_markov(c, 50);
  CHECK(r.errors == 0);
  CHECK(r.effective_rate == 0.0);
}

TEST_CASE("bin hash is uniform over 16 bins") {
  SchemeConfig c = adder_config(20, 0.0);
  c.R0 = 0.2;
  const CodebookBundle cb(resolve_config(c), c.R0, 99);
  REQUIRE(cb.m0_space().bits() == 4);
  CHECK(cb.bin_end().back() == 4);
  Rng rng(17);
  std::vector<int> hist(16, 0);
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    std::vector<int> z(20);
    for (auto& s : z) s = static_cast<int>(rng.next() % 5);
    ++hist[to_int(cb.bin(z))];
  }
  const double expect = draws / 16.0;
  double chi2 = 0.0;
  for (int h : hist) chi2 += (h - expect) * (h - expect) / expect;
  CHECK(chi2 < kChi2Df15);
}

TEST_CASE("codeword symbol frequencies follow the input law") {
  SchemeConfig c = adder_config(200, 0.1);
  c.R0 = 0.05;
  const auto rc = resolve_config(c);
  Rng rng(23);
  std::vector<double> joint(4, 0.0), y(3, 0.0);
  const int books = 20;
  for (int k = 0; k < books; ++k) {
    const CodebookBundle cb(rc, c.R0, rng.next());
    const auto m0 = cb.m0_space().uniform(rng);
    const auto m1 = cb.m1_space().uniform(rng);
    const auto x2 = cb.x2_codeword(m0);
    const auto x1 = cb.x1_codeword(m1, m0, x2);
    for (int t = 0; t < 200; ++t) {
      joint[x1[t] * 2 + x2[t]] += 1.0 / (200.0 * books);
      y[x1[t] + x2[t]] += 1.0 / (200.0 * books);
    }
  }
  const double q = 1.0 / 3;
  const std::vector<double> want = {(1 - q) / 2, q / 2, q / 2, (1 - q) / 2};
  for (int i = 0; i < 4; ++i) CHECK(std::abs(joint[i] - want[i]) < 0.05);
  for (int i = 0; i < 3; ++i) CHECK(std::abs(y[i] - 1.0 / 3) < 0.05);
}

TEST_CASE("codewords are deterministic in the seed") {
  const auto rc = resolve_config(adder_config(40, 0.3));
  const CodebookBundle a(rc, rc.R0, 7), b(rc, rc.R0, 7), c(rc, rc.R0, 8);
  const auto m0 = a.m0_space().zero();
  CHECK(a.x2_codeword(m0) == b.x2_codeword(m0));
  CHECK(a.x2_codeword(m0) != c.x2_codeword(m0));
}

TEST_CASE("identity channel without feedback is error-free below 1 bit") {
  SchemeConfig c;
  c.channel = make_first_input_identity();
  c.p = 1.0;
  c.n = 128;
  c.B = 4;
  c.R1 = 0.5;
  c.seed = 5;
  const auto r = run_block_markov(c, 1000);
  CHECK(r.trials == 1000);
  CHECK(r.errors == 0);
  CHECK(r.r0_used == 0.0);
  CHECK(r.effective_rate == doctest::Approx(0.75 * 64 / 128));
}

TEST_CASE("class check is required when feedback can occur") {
  SchemeConfig c;
  c.channel = make_first_input_identity();
  c.p = 0.5;
  c.n = 20;
  c.R1 = 0.2;
  CHECK_THROWS_AS(run_block_markov(c, 1), ValidationError);
}

TEST_CASE("configuration validation") {
  auto c = adder_config(30, 0.3);
  CHECK_THROWS_AS(run_block_markov(c, 0), ValidationError);
  auto d = c;
  d.B = 1;
  CHECK_THROWS_AS(run_block_markov(d, 1), ValidationError);
  d = c;
  d.R1 = -0.1;
  CHECK_THROWS_AS(run_block_markov(d, 1), ValidationError);
  d = c;
  d.input_dist = {0.5, 0.5};
  CHECK_THROWS_AS(run_block_markov(d, 1), ValidationError);
  d = c;
  d.R1 = 20.0;
  CHECK_THROWS_AS(run_block_markov(d, 1), ResourceError);
  d = c;
  d.n = 1 << 20;
  d.B = 128;
  CHECK_THROWS_AS(run_block_markov(d, 1), ResourceError);
}

TEST_CASE("block-Markov error falls with n at an in-region rate") {
  std::vector<double> hi;
  for (int n : {30, 60, 120}) {
    const auto r = run_block_markov(adder_config(n, 0.6 * 0.7924812503605781), 200);
    CHECK(r.ci_low <= r.error_rate);
    CHECK(r.error_rate <= r.ci_high);
    CHECK(r.errors == r.stage1_errors + r.stage2_errors);
    hi.push_back(r.ci_high);
  }
  CHECK(hi[0] > hi[1]);
  CHECK(hi[1] > hi[2]);
}

TEST_CASE("stage-1 errors fall across n doublings at the default R0") {
  std::vector<std::uint64_t> s1;
  for (int n : {60, 120, 240}) s1.push_back(run_block_markov(adder_config(n, 0.4), 200).stage1_errors);
  CHECK(s1[0] > s1[1]);
  CHECK(s1[1] > s1[2]);
}

TEST_CASE("rates above the outer bound fail") {
  auto c = adder_config(120, 1.3 * 0.7924812503605781);
  c.node_budget = 1 << 18;
  const auto r = run_block_markov(c, 200);
  CHECK(r.error_rate >= 0.5);
}

TEST_CASE("reports do not depend on the thread count") {
  auto c = adder_config(60, 0.45);
  const auto a = run_block_markov(c, 60);
  c.threads = 3;
  const auto b = run_block_markov(c, 60);
  CHECK(a.errors == b.errors);
  CHECK(a.stage1_errors == b.stage1_errors);
  CHECK(a.stage2_errors == b.stage2_errors);
  CHECK(a.search_overflows == b.search_overflows);
  CHECK(a.switch_fraction_ok == b.switch_fraction_ok);
}

TEST_CASE("feedforward fraction concentrates around p") {
  for (double p : {0.2, 0.5, 0.8}) {
    auto c = adder_config(100, 0.2);
    c.p = p;
    const auto r = run_block_markov(c, 200);
    CHECK(r.switch_fraction_checked == 200);
    CHECK(r.switch_fraction_ok >= 198);
  }
}

TEST_CASE("baseline: guessing when every output is erased") {
  SchemeConfig c = adder_config(30, 0.1);
  c.p = 0.0;
  c.R2 = 0.1;
  c.input_dist = {};
  const auto r = run_no_feedback_baseline(c, 2000);
  const double guess = 1.0 - 1.0 / 64.0;  // M1 = M2 = 2^3
  CHECK(r.ci_low <= guess);
  CHECK(guess <= r.ci_high);
  CHECK(r.effective_rate == doctest::Approx(0.2));
}

TEST_CASE("baseline: error falls with n inside the no-feedback region") {
  SchemeConfig c = adder_config(30, 0.225);
  c.R2 = 0.225;
  c.input_dist = {};
  const auto rows = sweep(c, SweepAxis::n, {30, 60, 120}, 200, Scheme::baseline);
  CHECK(rows[0].report.ci_high > rows[1].report.ci_high);
  CHECK(rows[1].report.ci_high > rows[2].report.ci_high);
}

TEST_CASE("baseline: sum rate above the no-feedback sum fails") {
  SchemeConfig c = adder_config(60, 0.45);
  c.R2 = 0.45;
  c.input_dist = {};
  c.node_budget = 1 << 16;
  CHECK(run_no_feedback_baseline(c, 100).error_rate >= 0.5);
}

TEST_CASE("sweeps") {
  auto c = adder_config(120, 0.3);
  c.node_budget = 1 << 18;
  const auto by_p = sweep(c, SweepAxis::p, {0.2, 0.5, 0.8}, 200);
  REQUIRE(by_p.size() == 3);
  CHECK(by_p[0].report.errors >= by_p[1].report.errors);
  CHECK(by_p[1].report.errors >= by_p[2].report.errors);

  // Error crosses one half between a low rate and one above the sum capacity 0.79248.
  const auto by_r = sweep(c, SweepAxis::R1, {0.4, 0.9}, 200);
  CHECK(by_r[0].report.error_rate < 0.5);
  CHECK(by_r[1].report.error_rate > 0.5);

  CHECK_THROWS_AS(sweep(c, SweepAxis::p, {}, 10), ValidationError);
  CHECK_THROWS_AS(sweep(c, SweepAxis::p, {0.5, 0.2, 0.8}, 10), ValidationError);
  CHECK_THROWS_AS(parse_axis("q"), ValidationError);

  const auto csv = sweep_csv(by_r, c.seed);
  CHECK(csv.rfind("axis_value,trials,errors,error_rate,ci_low,ci_high,stage1_errors,stage2_errors,seed\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}
