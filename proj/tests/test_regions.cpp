#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "swfb/errors.hpp"
#include "swfb/regions.hpp"
#include "swfb/rng.hpp"
#include "test_support.hpp"

using namespace swfb;
using swfb::testing::random_channel;

namespace {

double lg(double v) { return v > 0 ? std::log(v) / std::log(2.0) : 0.0; }
double hb(double q) { return -(q > 0 ? q * lg(q) : 0) - (q < 1 ? (1 - q) * lg(1 - q) : 0); }

const std::vector<Candidate>& adder_pool() {
  static const auto pool = structured_candidate_pool(make_binary_adder(), RegionOptions{});
  return pool;
}

const TwoWayBounds& adder_tw() {
  static const auto tw = two_way_sum_bounds(make_binary_adder());
  return tw;
}

double adder_ksp(const std::vector<double>& blocks) {
  return ksp_sum_capacity(make_binary_adder(), FeedforwardProfile::from_blocks(blocks),
                          static_cast<int>(blocks.size()), {}, &adder_pool(), &adder_tw())
      .sum_value_inner;
}

}  // namespace

TEST_CASE("hull regions") {
  auto r = hull_region({{1.0, 0.5}, {0.5, 1.0}}, RegionKind::inner);
  CHECK(r.sum_rate() == doctest::Approx(1.5));
  CHECK(r.support(1, 0) == doctest::Approx(1.0));
  CHECK(r.contains({0.75, 0.75}));
  CHECK_FALSE(r.contains({1.0, 1.0}));
  CHECK_FALSE(r.contains({-0.1, 0.0}));
  for (const auto& p : r.frontier) CHECK(r.contains(p));
  CHECK(r.frontier.size() == 2);

  auto z = hull_region({{0.0, 0.0}}, RegionKind::inner);
  CHECK(z.frontier.size() == 1);
  CHECK(z.sum_rate() == doctest::Approx(0.0));

  // A point strictly inside the hull adds nothing.
  auto t = hull_region({{2.0, 0.0}, {0.0, 2.0}, {0.9, 0.9}}, RegionKind::outer);
  CHECK(t.sum_rate() == doctest::Approx(2.0));
  CHECK(t.contains({1.0, 1.0}));
  CHECK_FALSE(t.contains({1.1, 1.0}));

  auto c = pentagon_corners(1.0, 0.8, 1.5);
  CHECK(c[2].r1 == doctest::Approx(1.0));
  CHECK(c[2].r2 == doctest::Approx(0.5));
  CHECK(c[3].r1 == doctest::Approx(0.7));
}

TEST_CASE("scaled capacity outer bound") {
  const auto adder = make_binary_adder();
  auto half = prop1_outer(adder, FeedforwardProfile::constant(0.5));
  CHECK(std::abs(half.sum_rate() - 0.5 * lg(3.0)) < 1e-7);
  CHECK(half.kind == RegionKind::outer);
  CHECK(prop1_outer(adder, FeedforwardProfile::constant(0.0)).sum_rate() == doctest::Approx(0.0));
  CHECK(std::abs(prop1_outer(adder, FeedforwardProfile::constant(1.0)).sum_rate() - 1.584963) < 1e-6);
}

TEST_CASE("no-feedback inner region on the adder") {
  RegionOptions o;
  o.u_size = 1;
  o.angles = 16;
  o.restarts = 8;
  const auto adder = make_binary_adder();
  // Oracle: product Bernoulli grid; I(X1X2;Y) = H(Y), I(X1;Y|X2) = h(a).
  double grid_sum = 0, grid_1 = 0;
  for (int i = 0; i <= 200; ++i)
    for (int j = 0; j <= 200; ++j) {
      const double a = i / 200.0, b = j / 200.0;
      const double p0 = (1 - a) * (1 - b), p2 = a * b, p1 = 1 - p0 - p2;
      grid_sum = std::max(grid_sum, -(p0 > 0 ? p0 * lg(p0) : 0) - (p1 > 0 ? p1 * lg(p1) : 0) -
                                        (p2 > 0 ? p2 * lg(p2) : 0));
      grid_1 = std::max(grid_1, hb(a));
    }
  auto full = prop2_inner(adder, FeedforwardProfile::constant(1.0), o);
  CHECK(std::abs(full.sum_rate() - 1.5) < 1e-6);
  CHECK(full.sum_rate() >= grid_sum - 1e-9);
  CHECK(std::abs(full.support(1, 0) - 1.0) < 1e-6);
  CHECK(std::abs(full.support(0, 1) - grid_1) < 1e-6);

  auto scaled = prop2_inner(adder, FeedforwardProfile::constant(0.4), o);
  CHECK(std::abs(scaled.sum_rate() - 0.6) < 1e-6);
  CHECK(std::abs(scaled.support(1, 0) - 0.4) < 1e-6);

  auto none = prop2_inner(adder, FeedforwardProfile::constant(0.0), o);
  CHECK(none.frontier.size() == 1);
  CHECK(none.frontier[0].r1 == 0.0);
  CHECK(none.frontier[0].r2 == 0.0);
}

TEST_CASE("exact region and entropy threshold on the adder") {
  const auto adder = make_binary_adder();
  const double c = lg(3.0);
  auto r = theorem1_region(adder, 0.5);
  CHECK(r.report.holds);
  CHECK(r.region.kind == RegionKind::exact);
  CHECK(std::abs(r.region.sum_rate() - 0.5 * c) < 1e-7);

  auto edge = theorem1_region(adder, 0.5794);
  CHECK(std::abs(edge.region.sum_rate() - hb(1.0 / 3)) < 1e-3);

  // Oracle: max_q min{h(q), h(q) + 1 - q} over the symmetric source.
  double scan = 0;
  for (int k = 0; k <= 10000; ++k) {
    const double q = k / 10000.0;
    scan = std::max(scan, std::min(hb(q), hb(q) + 1 - q));
  }
  auto one = theorem1_region(adder, 1.0);
  CHECK_FALSE(one.report.holds);
  CHECK(one.region.kind == RegionKind::inner);
  CHECK(std::abs(one.region.sum_rate() - scan) < 1e-6);

  const double thr = theorem1_threshold(adder);
  CHECK(std::abs(thr - hb(1.0 / 3) / c) < 1e-6);
  CHECK(std::abs(thr - 0.5794) < 1e-3);

  // Cross-check: bisection on p with max_P min{H, pI} against p*C.
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 30; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double g = std::max(maxmin_entropy_rate(adder, mid, true), maxmin_entropy_rate(adder, mid, false));
    (g >= mid * c - 1e-6 ? lo : hi) = mid;
  }
  CHECK(std::abs(lo - thr) < 2e-2);

  CHECK_THROWS_AS(theorem1_region(make_first_input_identity(), 0.5), ValidationError);
  CHECK_THROWS_AS(theorem1_threshold(make_first_input_identity()), ValidationError);
  CHECK(std::abs(theorem1_threshold(make_binary_xor()) - 1.0) < 1e-6);
}

TEST_CASE("revealed-group modular channel") {
  auto e = build_example2(2);
  CHECK(e.x1_size() == 8);
  CHECK(e.x2_size() == 8);
  CHECK(e.y_size() == 24);
  CHECK(theorem1_class_check(e).holds);
  auto ba = max_joint_mi(e);
  CHECK(std::abs(ba.value - lg(24.0)) < 1e-6);
  auto j = channel_joint(e, ba.argmax);
  const double alpha = 2, m = 8;
  const double bound = 1 + alpha * lg(alpha) / (alpha + 1) + 2 * lg(m) / (alpha + 1);
  CHECK(conditional_entropy(j, {"X1"}, {"X2"}) <= bound + 1e-9);
  const double t2 = theorem1_threshold(e);
  const double t3 = theorem1_threshold(build_example2(3));
  CHECK(t3 < t2);
  CHECK(t2 < theorem1_threshold(make_binary_adder()));
  CHECK_THROWS_AS(build_example2(6), ResourceError);
  CHECK_THROWS_AS(build_example2(1), ValidationError);
}

TEST_CASE("ksp objective by b0") {
  // Hand evaluation, B = 2, p = (0, 1), TW = 2, Icu = (0.5, 1), I = (1, 1.5).
  auto v = ksp_objective_by_b0({0.0, 1.0}, {0.5, 1.0}, {1.0, 1.5}, 2.0);
  REQUIRE(v.size() == 3);
  CHECK(v[0] == doctest::Approx(0.75));
  CHECK(v[1] == doctest::Approx(1.75));
  CHECK(v[2] == doctest::Approx(1.5));
}

TEST_CASE("ksp sum capacity on the adder") {
  const auto adder = make_binary_adder();
  CHECK(std::abs(adder_ksp({1.0}) - 1.5) < 1e-6);
  CHECK(std::abs(adder_ksp({1.0, 1.0, 1.0, 1.0}) - 1.5) < 1e-6);
  CHECK(adder_ksp({0.0, 0.0}) == 0.0);
  CHECK(std::abs(adder_ksp({0.5}) - 0.5 * lg(3.0)) < 1e-6);

  auto step = ksp_sum_capacity(adder, FeedforwardProfile::step(0.5), 16, {}, &adder_pool(), &adder_tw());
  CHECK(step.sum_value_inner <= step.sum_value_outer);
  CHECK(step.sum_value_inner <= 0.5 * lg(3.0) + 1e-6);
  CHECK(step.sum_value_outer >= 0.5 * lg(3.0) - 1e-6);
  // The reported value is the minimum over b0 at the reported blocks.
  std::vector<double> p, ic, ij;
  for (const auto& b : step.per_block) {
    p.push_back(b.p_bar);
    ic.push_back(b.i_cond_sum);
    ij.push_back(b.i_joint);
  }
  auto v = ksp_objective_by_b0(p, ic, ij, step.tw_bounds.sum_inner);
  CHECK(*std::min_element(v.begin(), v.end()) == doctest::Approx(step.sum_value_inner));
  CHECK(v[step.tau_star - 1] == doctest::Approx(step.sum_value_inner));
}

TEST_CASE("feedback-first ordering dominates") {
  std::vector<double> blocks{0.0, 0.0, 1.0, 1.0};
  const double first = adder_ksp(blocks);
  do {
    CHECK(adder_ksp(blocks) <= first + 1e-12);
  } while (std::next_permutation(blocks.begin(), blocks.end()));
  CHECK(first >= adder_ksp({1.0, 1.0, 0.0, 0.0}));
}

TEST_CASE("ksp monotone in the profile on the adder") {
  const double levels[] = {0.0, 0.2, 0.4, 0.6, 0.8};
  for (double a : levels)
    for (double b : levels) {
      const double base = adder_ksp({a, b});
      CHECK(adder_ksp({std::min(0.8, a + 0.2), b}) >= base - 1e-9);
      CHECK(adder_ksp({a, std::min(0.8, b + 0.2)}) >= base - 1e-9);
    }
}

TEST_CASE("endpoint b0 for nondecreasing profiles with fixed distributions") {
  Rng rng(77);
  for (int trial = 0; trial < 10; ++trial) {
    auto ch = random_channel(rng, 2, 2, 3);
    StructuredOptions so;
    so.restarts = 4;
    auto tw = two_way_sum_bounds(ch, so);
    StructuredInputDist d = structured_from_joint(std::vector<double>{0.1, 0.2, 0.3, 0.4}, 2, 2, 2);
    auto t = evaluate_terms(ch, d);
    std::vector<double> p(8);
    for (double& v : p) v = rng.uniform();
    std::sort(p.begin(), p.end());
    auto v = ksp_objective_by_b0(p, std::vector<double>(8, t.cond_sum), std::vector<double>(8, t.joint),
                                 tw.sum_inner);
    const double mn = *std::min_element(v.begin(), v.end());
    CHECK(std::min(v.front(), v.back()) <= mn + 1e-12);
  }
}

TEST_CASE("time-varying regions on the adder") {
  const auto adder = make_binary_adder();
  auto one = corollary_region(adder, 1.0, {}, &adder_pool(), &adder_tw());
  CHECK(std::abs(one.inner.sum_rate() - 1.5) < 1e-6);
  auto zero = corollary_region(adder, 0.0, {}, &adder_pool(), &adder_tw());
  CHECK(zero.inner.sum_rate() == doctest::Approx(0.0));
  CHECK(zero.inner.support(1, 0) == doctest::Approx(0.0));
  auto half = corollary_region(adder, 0.5, {}, &adder_pool(), &adder_tw());
  CHECK(half.inner.kind == RegionKind::exact);
  CHECK(std::abs(half.inner.sum_rate() - theorem1_region(adder, 0.5).region.sum_rate()) < 1e-6);
  CHECK(half.outer.sum_rate() >= half.inner.sum_rate() - 1e-12);
  CHECK_THROWS_AS(corollary_region(adder, 1.5, {}, &adder_pool(), &adder_tw()), ValidationError);
}

TEST_CASE("finite-B evaluation") {
  const auto adder = make_binary_adder();
  const auto& tw = adder_tw();
  auto l = lemma1_finite_B_region(adder, FeedforwardProfile::constant(0.5), 1, 1e-9, tw.s1_inner,
                                  tw.s2_inner, {}, &adder_pool(), &tw);
  CHECK(std::abs(l.sum_value - adder_ksp({0.5})) < 1e-6);

  auto off = lemma1_finite_B_region(adder, FeedforwardProfile::constant(0.0), 2, 0.5, 1.0, 1.0, {},
                                    &adder_pool(), &tw);
  CHECK(off.sum_value == 0.0);

  auto a = lemma1_finite_B_region(adder, FeedforwardProfile::constant(0.5), 4, 0.01, 1.0, 1.0, {},
                                  &adder_pool(), &tw);
  auto b = lemma1_finite_B_region(adder, FeedforwardProfile::constant(0.5), 4, 0.1, 1.0, 1.0, {},
                                  &adder_pool(), &tw);
  CHECK(a.sum_value >= b.sum_value);
  CHECK(a.r1_bound >= b.r1_bound);

  for (int B : {1, 2, 4, 8}) {
    auto s = lemma1_finite_B_region(adder, FeedforwardProfile::step(0.5), B, 1e-9, 1.0, 1.0, {},
                                    &adder_pool(), &tw);
    auto k = ksp_sum_capacity(adder, FeedforwardProfile::step(0.5), B, {}, &adder_pool(), &tw);
    CHECK(std::abs(s.sum_value - k.sum_value_inner) < 1e-6);
  }
  CHECK_THROWS_AS(lemma1_finite_B_region(adder, FeedforwardProfile::constant(0.5), 1, 0.0, 1, 1, {},
                                         &adder_pool(), &tw),
                  ValidationError);
  CHECK_THROWS_AS(lemma1_finite_B_region(adder, FeedforwardProfile::constant(0.5), 1, 0.1, 1.5, 1, {},
                                         &adder_pool(), &tw),
                  ValidationError);
}

TEST_CASE("region sandwich on random channels") {
  Rng rng(123);
  RegionOptions o;
  o.angles = 8;
  o.restarts = 4;
  for (int trial = 0; trial < 5; ++trial) {
    auto ch = random_channel(rng, 2, 2, 3);
    const double p = rng.uniform();
    auto pool = structured_candidate_pool(ch, o);
    auto tw = two_way_sum_bounds(ch, o.structured());
    auto p2 = prop2_inner(ch, FeedforwardProfile::constant(p), o, &pool);
    auto cor = corollary_region(ch, p, o, &pool, &tw);
    auto p1 = prop1_outer(ch, FeedforwardProfile::constant(p));
    for (const auto& q : p2.frontier) CHECK(cor.inner.contains(q, 1e-9));
    for (const auto& q : cor.inner.frontier) CHECK(p1.contains(q, 1e-9));
    for (const auto& q : cor.inner.frontier) CHECK(cor.outer.contains(q, 1e-9));
  }
}
