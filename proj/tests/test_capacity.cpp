#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "swfb/capacity.hpp"
#include "swfb/errors.hpp"
#include "swfb/rng.hpp"
#include "test_support.hpp"

using namespace swfb;
using swfb::testing::random_channel;

namespace {

double lg(double v) { return v > 0 ? std::log(v) / std::log(2.0) : 0.0; }
double hb(double q) { return -(q > 0 ? q * lg(q) : 0) - (q < 1 ? (1 - q) * lg(1 - q) : 0); }

// Adder with independent Bernoulli(a), Bernoulli(b) inputs: I(X1X2;Y) = H(Y).
double adder_sum_rate(double a, double b) {
  const double p0 = (1 - a) * (1 - b), p2 = a * b, p1 = 1 - p0 - p2;
  return -(p0 > 0 ? p0 * lg(p0) : 0) - (p1 > 0 ? p1 * lg(p1) : 0) - (p2 > 0 ? p2 * lg(p2) : 0);
}

StructuredOptions quick() {
  StructuredOptions o;
  o.restarts = 6;
  return o;
}

}  // namespace

TEST_CASE("Blahut-Arimoto on the adder") {
  auto r = max_joint_mi(make_binary_adder());
  CHECK(std::abs(r.value - lg(3.0)) < 1e-6);
  CHECK(r.gap_bound < 1e-9);
  // Output law uniform on {0,1,2}.
  const double py0 = r.argmax[0], py2 = r.argmax[3], py1 = r.argmax[1] + r.argmax[2];
  CHECK(py0 == doctest::Approx(1.0 / 3).epsilon(1e-6));
  CHECK(py1 == doctest::Approx(1.0 / 3).epsilon(1e-6));
  CHECK(py2 == doctest::Approx(1.0 / 3).epsilon(1e-6));
  auto j = channel_joint(make_binary_adder(), r.argmax);
  CHECK(std::abs(conditional_mutual_information(j, {"X1", "X2"}, {"Y"}, {}) - r.value) < 1e-9);
}

TEST_CASE("Blahut-Arimoto small cases") {
  CHECK(max_joint_mi(make_first_input_identity()).value == doctest::Approx(1.0).epsilon(1e-8));
  const MacChannel useless(2, 2, 2, std::vector<double>(8, 0.5));
  CHECK(max_joint_mi(useless).value == doctest::Approx(0.0));
  CHECK_THROWS_AS(max_joint_mi(make_binary_adder(), 1e-30, 3), ConvergenceError);
  try {
    max_joint_mi(make_binary_adder(), 1e-30, 3);
  } catch (const ConvergenceError& e) {
    CHECK(e.best_value() > 1.0);
    CHECK(e.gap() > 0.0);
  }
}

TEST_CASE("capacity invariant under relabeling") {
  Rng rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    auto ch = random_channel(rng, 2, 3, 4);
    std::vector<int> py{2, 0, 3, 1};
    std::vector<double> t(ch.table().size());
    // Swap X1 symbols, rotate X2, permute Y.
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 3; ++b)
        for (int y = 0; y < 4; ++y) t[((1 - a) * 3 + (b + 1) % 3) * 4 + py[y]] = ch(a, b, y);
    MacChannel perm(2, 3, 4, t);
    CHECK(std::abs(max_joint_mi(ch).value - max_joint_mi(perm).value) < 1e-7);
  }
}

TEST_CASE("structured optimum over independent inputs, adder") {
  double grid = 0;
  for (int i = 0; i <= 1000; ++i)
    for (int k = 0; k <= 1000; k += 10) grid = std::max(grid, adder_sum_rate(i / 1000.0, k / 1000.0));
  auto o = quick();
  o.u_size = 1;
  auto r = max_structured({1, 0, 0, 0}, make_binary_adder(), o);
  CHECK(std::abs(r.value - 1.5) < 1e-6);
  CHECK(r.value >= grid - 1e-9);

  double grid1 = 0;
  for (int i = 0; i <= 1000; ++i) grid1 = std::max(grid1, hb(i / 1000.0));
  auto r1 = max_structured({0, 1, 0, 0}, make_binary_adder(), o);
  CHECK(std::abs(r1.value - 1.0) < 1e-6);
  CHECK(r1.value >= grid1 - 1e-9);
}

TEST_CASE("structured with full auxiliary matches joint capacity") {
  Rng rng(17);
  std::vector<MacChannel> chans{make_binary_adder(), make_binary_xor()};
  for (int i = 0; i < 4; ++i) chans.push_back(random_channel(rng, 2, 2, 3));
  for (const auto& ch : chans) {
    auto o = quick();
    o.u_size = ch.input_count();
    auto r = max_structured({0, 0, 0, 1}, ch, o);
    const double ba = max_joint_mi(ch).value;
    CHECK(std::abs(r.value - ba) <= 2 * o.tol);
  }
}

TEST_CASE("larger auxiliary never hurts") {
  Rng rng(29);
  for (int i = 0; i < 4; ++i) {
    auto ch = random_channel(rng, 2, 2, 3);
    double prev = -1;
    for (int k = 1; k <= 3; ++k) {
      auto o = quick();
      o.u_size = k;
      auto r = max_structured({1, 0.5, 0.5, 1}, ch, o);
      if (prev >= 0) CHECK(prev <= r.value + o.tol);
      prev = r.value;
    }
  }
}

TEST_CASE("structured ascent is monotone from any start") {
  Rng rng(41);
  auto ch = random_channel(rng, 3, 2, 3);
  const ObjectiveWeights w{0.3, 1, 0.2, 0.6};
  double prev = -1;
  auto start = structured_from_joint(std::vector<double>(6, 1.0 / 6), 3, 2, 3);
  start.p_u = {0.5, 0.3, 0.2};
  for (int iters : {0, 1, 2, 5, 20, 100}) {
    auto r = structured_ascent(w, ch, start, 1e-12, iters);
    CHECK(r.value >= prev - 1e-12);
    prev = r.value;
  }
}

TEST_CASE("restart merge is independent of thread count") {
  auto ch = make_binary_adder();
  auto o = quick();
  o.u_size = 3;
  auto a = max_structured({1, 0, 0, 1}, ch, o);
  o.threads = 3;
  auto b = max_structured({1, 0, 0, 1}, ch, o);
  CHECK(a.value == b.value);
  CHECK(a.argmax == b.argmax);
}

TEST_CASE("two-way bounds") {
  auto adder = two_way_sum_bounds(make_binary_adder(), quick());
  CHECK(std::abs(adder.sum_inner - 2.0) < 1e-6);
  CHECK(std::abs(adder.sum_outer - 2.0) < 1e-6);
  // Oracle: grid over product Bernoulli inputs, I(X1;Y|X2) + I(X2;Y|X1) = h(a) + h(b).
  double grid = 0;
  for (int i = 0; i <= 1000; ++i) grid = std::max(grid, 2 * hb(i / 1000.0));
  CHECK(adder.sum_inner >= grid - 1e-9);

  const MacChannel useless(2, 2, 2, std::vector<double>(8, 0.5));
  auto u = two_way_sum_bounds(useless, quick());
  CHECK(u.sum_inner == doctest::Approx(0.0));
  CHECK(u.sum_outer == doctest::Approx(0.0).epsilon(1e-6));

  auto id = two_way_sum_bounds(make_first_input_identity(), quick());
  CHECK(std::abs(id.sum_inner - 1.0) < 1e-6);
  CHECK(std::abs(id.sum_outer - 1.0) < 1e-6);

  Rng rng(5);
  for (int i = 0; i < 10; ++i) {
    auto b = two_way_sum_bounds(random_channel(rng, 2, 2, 3), quick());
    CHECK(b.sum_inner <= b.sum_outer);
    CHECK(b.s1_inner <= b.s1_outer);
  }
}

TEST_CASE("class check") {
  CHECK(theorem1_class_check(make_binary_adder()).holds);
  CHECK(theorem1_class_check(make_binary_xor()).holds);
  auto id = theorem1_class_check(make_first_input_identity());
  CHECK_FALSE(id.holds);
  CHECK_FALSE(id.first_ambiguous);
  CHECK(id.a != id.b);
  CHECK_FALSE(id.describe().empty());

  // Entropy spot check on random joints for a class member.
  Rng rng(8);
  for (int t = 0; t < 20; ++t) {
    std::vector<double> p(4);
    double z = 0;
    for (double& v : p) z += (v = rng.uniform());
    for (double& v : p) v /= z;
    auto j = channel_joint(make_binary_adder(), p);
    CHECK(conditional_entropy(j, {"X1"}, {"Y", "X2"}) < 1e-10);
    CHECK(conditional_entropy(j, {"X2"}, {"Y", "X1"}) < 1e-10);
  }
}
