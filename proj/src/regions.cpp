#include "swfb/regions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "swfb/errors.hpp"
#include "swfb/objective.hpp"
#include "swfb/rng.hpp"

namespace swfb {

std::string to_string(RegionKind kind) {
  switch (kind) {
    case RegionKind::inner: return "inner";
    case RegionKind::outer: return "outer";
    case RegionKind::exact: return "exact";
  }
  return "inner";
}

bool RateRegion::contains(RatePoint p, double slack) const {
  for (const auto& h : constraints)
    if (h.a * p.r1 + h.b * p.r2 > h.c + slack) return false;
  return true;
}

std::vector<RatePoint> RateRegion::vertices() const {
  std::vector<RatePoint> out;
  const std::size_t k = constraints.size();
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j) {
      const auto& f = constraints[i];
      const auto& g = constraints[j];
      const double det = f.a * g.b - f.b * g.a;
      if (std::abs(det) < 1e-14) continue;
      const RatePoint p{(f.c * g.b - f.b * g.c) / det, (f.a * g.c - f.c * g.a) / det};
      if (!contains(p, 1e-9)) continue;
      const bool dup = std::any_of(out.begin(), out.end(), [&](const RatePoint& q) {
        return std::abs(q.r1 - p.r1) < 1e-12 && std::abs(q.r2 - p.r2) < 1e-12;
      });
      if (!dup) out.push_back(p);
    }
  return out;
}

double RateRegion::support(double w1, double w2) const {
  const auto v = vertices();
  if (v.empty()) throw ValidationError("region has no vertices");
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& p : v) best = std::max(best, w1 * p.r1 + w2 * p.r2);
  return best;
}

std::vector<RatePoint> pentagon_corners(double c1, double c2, double csum) {
  c1 = std::max(0.0, std::min(c1, csum));
  c2 = std::max(0.0, std::min(c2, csum));
  csum = std::max(0.0, csum);
  return {{0.0, 0.0},
          {c1, 0.0},
          {c1, std::max(0.0, std::min(c2, csum - c1))},
          {std::max(0.0, std::min(c1, csum - c2)), c2},
          {0.0, c2}};
}

namespace {

double cross(const RatePoint& o, const RatePoint& a, const RatePoint& b) {
  return (a.r1 - o.r1) * (b.r2 - o.r2) - (a.r2 - o.r2) * (b.r1 - o.r1);
}

// True when a is not strictly left of o->b. The threshold is on the sine of the
// turn angle, so short edges between nearby candidates are kept.
bool not_left_turn(const RatePoint& o, const RatePoint& a, const RatePoint& b) {
  const double la = std::hypot(a.r1 - o.r1, a.r2 - o.r2);
  const double lb = std::hypot(b.r1 - o.r1, b.r2 - o.r2);
  return cross(o, a, b) <= 1e-12 * la * lb;
}

// Counter-clockwise convex hull (Andrew's monotone chain), collinear points dropped.
std::vector<RatePoint> convex_hull(std::vector<RatePoint> pts) {
  std::sort(pts.begin(), pts.end(), [](const RatePoint& a, const RatePoint& b) {
    return a.r1 < b.r1 || (a.r1 == b.r1 && a.r2 < b.r2);
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const RatePoint& a, const RatePoint& b) {
                          return a.r1 == b.r1 && a.r2 == b.r2;
                        }),
            pts.end());
  if (pts.size() < 3) return pts;
  std::vector<RatePoint> h(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && not_left_turn(h[k - 2], h[k - 1], p)) --k;
    h[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && not_left_turn(h[k - 2], h[k - 1], pts[i])) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  return h;
}

}  // namespace

RateRegion hull_region(const std::vector<RatePoint>& points, RegionKind kind) {
  std::vector<RatePoint> pts{{0.0, 0.0}};
  for (const auto& p : points) {
    const RatePoint q{std::max(0.0, p.r1), std::max(0.0, p.r2)};
    pts.push_back(q);
    pts.push_back({q.r1, 0.0});
    pts.push_back({0.0, q.r2});
  }
  RateRegion reg;
  reg.kind = kind;
  double m1 = 0, m2 = 0, ms = 0;
  for (const auto& p : pts) {
    m1 = std::max(m1, p.r1);
    m2 = std::max(m2, p.r2);
    ms = std::max(ms, p.r1 + p.r2);
  }
  reg.constraints.push_back({1.0, 0.0, m1, "R1"});
  reg.constraints.push_back({0.0, 1.0, m2, "R2"});
  reg.constraints.push_back({1.0, 1.0, ms, "sum"});
  reg.constraints.push_back({-1.0, 0.0, 0.0, "R1>=0"});
  reg.constraints.push_back({0.0, -1.0, 0.0, "R2>=0"});

  const auto hull = convex_hull(pts);
  if (hull.size() >= 3) {
    for (std::size_t i = 0; i < hull.size(); ++i) {
      const auto& a = hull[i];
      const auto& b = hull[(i + 1) % hull.size()];
      double nx = b.r2 - a.r2, ny = a.r1 - b.r1;
      const double len = std::hypot(nx, ny);
      if (len < 1e-15) continue;
      nx /= len;
      ny /= len;
      // Axis edges are the nonnegativity constraints; vertical/horizontal ones are R1/R2.
      if (nx < 1e-12 || ny < 1e-12) continue;
      // Offset from the whole point set, so a short edge with a rounded normal
      // still bounds every input point.
      double c = 0.0;
      for (const auto& q : pts) c = std::max(c, nx * q.r1 + ny * q.r2);
      reg.constraints.push_back({nx, ny, c, "facet"});
    }
  }
  // Pareto-optimal hull points, sorted by R1.
  auto v = hull;
  std::sort(v.begin(), v.end(), [](const RatePoint& a, const RatePoint& b) { return a.r1 < b.r1; });
  for (const auto& p : v) {
    const bool dominated = std::any_of(v.begin(), v.end(), [&](const RatePoint& q) {
      return q.r1 >= p.r1 - 1e-12 && q.r2 >= p.r2 - 1e-12 &&
             (q.r1 > p.r1 + 1e-12 || q.r2 > p.r2 + 1e-12);
    });
    if (!dominated) reg.frontier.push_back(p);
  }
  if (reg.frontier.empty()) reg.frontier.push_back({0.0, 0.0});
  return reg;
}

StructuredOptions RegionOptions::structured() const {
  StructuredOptions o;
  o.u_size = u_size;
  o.restarts = restarts;
  o.tol = tol;
  o.seed = seed;
  o.threads = threads;
  return o;
}

std::vector<Candidate> structured_candidate_pool(const MacChannel& channel,
                                                 const RegionOptions& options) {
  if (options.angles < 2 || options.angles % 2 != 0)
    throw ValidationError("angles must be an even number >= 2");
  std::vector<ObjectiveWeights> weights;
  auto add = [&](ObjectiveWeights w) {
    const double m = std::max({w.cond_sum, w.cond_1, w.cond_2, w.joint});
    if (m <= 0.0) return;
    w = {w.cond_sum / m, w.cond_1 / m, w.cond_2 / m, w.joint / m};
    for (const auto& e : weights)
      if (std::abs(e.cond_sum - w.cond_sum) < 1e-12 && std::abs(e.cond_1 - w.cond_1) < 1e-12 &&
          std::abs(e.cond_2 - w.cond_2) < 1e-12 && std::abs(e.joint - w.joint) < 1e-12)
        return;
    weights.push_back(w);
  };
  // Pentagon corners along each support direction.
  for (int k = 0; k <= options.angles; ++k) {
    const double th = (std::numbers::pi / 2) * k / options.angles;
    const double w1 = k == options.angles ? 0.0 : std::cos(th);
    const double w2 = k == 0 ? 0.0 : std::sin(th);
    if (w1 >= w2)
      add({w2, w1 - w2, 0.0, 0.0});
    else
      add({w1, 0.0, w2 - w1, 0.0});
  }
  // Tradeoff between the conditional and unconditional sum terms.
  for (int k = 0; k <= 16; ++k) add({k / 16.0, 0.0, 0.0, 1.0 - k / 16.0});
  for (int a = 0; a <= 4; ++a)
    for (int b = 0; a + b <= 4; ++b)
      for (int c = 0; a + b + c <= 4; ++c) add({a / 4.0, b / 4.0, c / 4.0, (4 - a - b - c) / 4.0});

  std::vector<Candidate> pool;
  const auto so = options.structured();
  for (const auto& w : weights) {
    auto r = max_structured(w, channel, so);
    pool.push_back({r.argmax, evaluate_terms(channel, r.argmax)});
  }
  const auto ba = max_joint_mi(channel, 1e-10);
  auto seed = structured_from_joint(ba.argmax, channel.x1_size(), channel.x2_size(),
                                    resolve_u_size(channel, options.u_size));
  pool.push_back({seed, evaluate_terms(channel, seed)});
  return pool;
}

RateRegion prop1_outer(const MacChannel& channel, const FeedforwardProfile& profile) {
  const double c = profile.average() * max_joint_mi(channel, 1e-10).value;
  auto reg = hull_region({{c, 0.0}, {0.0, c}}, RegionKind::outer);
  return reg;
}

RateRegion prop2_inner(const MacChannel& channel, const FeedforwardProfile& profile,
                       const RegionOptions& options, const std::vector<Candidate>* pool) {
  std::vector<Candidate> local;
  if (!pool) {
    local = structured_candidate_pool(channel, options);
    pool = &local;
  }
  const double p = profile.average();
  std::vector<RatePoint> pts;
  for (const auto& c : *pool)
    for (const auto& q : pentagon_corners(p * c.terms.cond_1, p * c.terms.cond_2, p * c.terms.cond_sum))
      pts.push_back(q);
  return hull_region(pts, RegionKind::inner);
}

// ---------------------------------------------------------------------------
// Exact region below the entropy threshold

namespace {

std::vector<EntropyTerm> cond_entropy_terms(bool first, double coef) {
  // H(X1|X2) = H(X1X2) - H(X2); H(X2|X1) = H(X1X2) - H(X1).
  return {{coef, kX1 | kX2}, {-coef, first ? kX2 : kX1}};
}

std::vector<EntropyTerm> joint_info_terms(double coef) {
  return {{coef, kY}, {-coef, kX1 | kX2 | kY}, {coef, kX1 | kX2}};
}

std::vector<EntropyTerm> concat(std::vector<EntropyTerm> a, const std::vector<EntropyTerm>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

struct CapacityPoint {
  double capacity;
  std::vector<double> argmax;
  std::vector<double> q_out;
  std::vector<double> divergence;
};

CapacityPoint capacity_point(const MacChannel& ch) {
  const auto ba = max_joint_mi(ch, 1e-11);
  CapacityPoint c{ba.value, ba.argmax, std::vector<double>(ch.y_size(), 0.0),
                  std::vector<double>(ch.input_count(), 0.0)};
  for (int x = 0; x < ch.input_count(); ++x) {
    auto r = ch.row(x);
    for (int y = 0; y < ch.y_size(); ++y) c.q_out[y] += ba.argmax[x] * r[y];
  }
  for (int x = 0; x < ch.input_count(); ++x) {
    auto r = ch.row(x);
    double d = 0.0;
    for (int y = 0; y < ch.y_size(); ++y)
      if (r[y] > 0.0) d += r[y] * std::log2(r[y] / c.q_out[y]);
    c.divergence[x] = d;
  }
  return c;
}

}  // namespace

double max_conditional_entropy_at_capacity(const MacChannel& ch, bool first) {
  const auto cp = capacity_point(ch);
  const int nx = ch.input_count(), ny = ch.y_size();
  // Inputs that can carry mass in a capacity-achieving distribution.
  std::vector<double> p(nx, 0.0);
  int support = 0;
  for (int x = 0; x < nx; ++x) support += cp.divergence[x] >= cp.capacity - 1e-6;
  for (int x = 0; x < nx; ++x)
    if (cp.divergence[x] >= cp.capacity - 1e-6) p[x] = 0.9 * cp.argmax[x] + 0.1 / support;
  const EntropyCombination h(ch, 1, cond_entropy_terms(first, 1.0));
  std::vector<double> nu(ny, 0.0), c(ny);
  double rho = 10.0, prev_violation = std::numeric_limits<double>::infinity();
  auto residual = [&](std::span<const double> x) {
    std::fill(c.begin(), c.end(), 0.0);
    for (int i = 0; i < nx; ++i) {
      if (x[i] == 0.0) continue;
      auto r = ch.row(i);
      for (int y = 0; y < ny; ++y) c[y] += x[i] * r[y];
    }
    for (int y = 0; y < ny; ++y) c[y] -= cp.q_out[y];
  };
  for (int outer = 0; outer < 100; ++outer) {
    auto lagrangian = [&](std::span<const double> x, std::span<double> g) {
      double v = h.value_and_gradient(x, g);
      residual(x);
      for (int y = 0; y < ny; ++y) v -= nu[y] * c[y] + 0.5 * rho * c[y] * c[y];
      for (int i = 0; i < nx; ++i) {
        auto r = ch.row(i);
        for (int y = 0; y < ny; ++y)
          if (r[y] > 0.0) g[i] -= (nu[y] + rho * c[y]) * r[y];
      }
      return v;
    };
    simplex_ascent(lagrangian, p, 1e-11, 20000);
    residual(p);
    double violation = 0.0;
    for (int y = 0; y < ny; ++y) {
      nu[y] += rho * c[y];
      violation = std::max(violation, std::abs(c[y]));
    }
    if (violation < 1e-10) break;
    if (violation > 0.25 * prev_violation) rho = std::min(rho * 2.0, 1e9);
    prev_violation = violation;
  }
  return std::max(0.0, h.value(p));
}

double maxmin_entropy_rate(const MacChannel& ch, double p, bool first) {
  const int nx = ch.input_count();
  const EntropyCombination hf(ch, 1, cond_entropy_terms(first, 1.0));
  const EntropyCombination inf(ch, 1, joint_info_terms(1.0));
  double best = 0.0;
  auto score = [&](const std::vector<double>& x, double* hv = nullptr, double* iv = nullptr) {
    const double a = hf.value(x), b = p * inf.value(x);
    best = std::max(best, std::min(a, b));
    if (hv) *hv = a;
    if (iv) *iv = b;
  };
  auto solve = [&](double lam) {
    std::vector<double> x(nx, 1.0 / nx);
    concave_joint_ascent(ch, concat(cond_entropy_terms(first, lam), joint_info_terms((1 - lam) * p)),
                         x, 1e-11, 20000);
    return x;
  };
  double h0, i0, h1, i1;
  auto x0 = solve(0.0);
  score(x0, &h0, &i0);
  auto x1 = solve(1.0);
  score(x1, &h1, &i1);
  if (h0 >= i0 || h1 <= i1) return best;
  // H - pI changes sign along lambda; bisect and scan mixtures of the bracket.
  double lo = 0.0, hi = 1.0;
  auto xlo = x0, xhi = x1;
  for (int it = 0; it < 50; ++it) {
    const double mid = 0.5 * (lo + hi);
    auto xm = solve(mid);
    double hm, im;
    score(xm, &hm, &im);
    if (hm < im) {
      lo = mid;
      xlo = std::move(xm);
    } else {
      hi = mid;
      xhi = std::move(xm);
    }
  }
  std::vector<double> mix(nx);
  for (int k = 0; k <= 1000; ++k) {
    const double mu = k / 1000.0;
    for (int i = 0; i < nx; ++i) mix[i] = mu * xlo[i] + (1 - mu) * xhi[i];
    score(mix);
  }
  if (ch.x1_size() == 2 && ch.x2_size() == 2) {
    for (int k = 0; k <= 1000; ++k) {
      const double q = k / 1000.0;
      score({(1 - q) / 2, q / 2, q / 2, (1 - q) / 2});
    }
  }
  return best;
}

Theorem1Result theorem1_region(const MacChannel& channel, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("p outside [0,1]");
  const auto cc = theorem1_class_check(channel);
  if (!cc.holds) throw ValidationError("channel outside the class: " + cc.describe());
  Theorem1Result r;
  auto& rep = r.report;
  rep.capacity = max_joint_mi(channel, 1e-11).value;
  rep.p_capacity = p * rep.capacity;
  rep.h_star = std::max(max_conditional_entropy_at_capacity(channel, true),
                        max_conditional_entropy_at_capacity(channel, false));
  rep.threshold = rep.capacity > 0.0 ? std::min(1.0, rep.h_star / rep.capacity) : 1.0;
  rep.holds = rep.p_capacity <= rep.h_star + 1e-7;
  rep.a1 = maxmin_entropy_rate(channel, p, true);
  rep.a2 = maxmin_entropy_rate(channel, p, false);
  if (rep.holds)
    r.region = hull_region({{rep.p_capacity, 0.0}, {0.0, rep.p_capacity}}, RegionKind::exact);
  else
    r.region = hull_region({{rep.a1, 0.0}, {0.0, rep.a2}}, RegionKind::inner);
  return r;
}

double theorem1_threshold(const MacChannel& channel) {
  const auto cc = theorem1_class_check(channel);
  if (!cc.holds) throw ValidationError("channel outside the class: " + cc.describe());
  const double c = max_joint_mi(channel, 1e-11).value;
  if (c <= 0.0) return 1.0;
  const double hs = std::max(max_conditional_entropy_at_capacity(channel, true),
                             max_conditional_entropy_at_capacity(channel, false));
  return std::min(1.0, hs / c);
}

MacChannel build_example2(int alpha) {
  if (alpha < 2) throw ValidationError("alpha must be >= 2");
  if (alpha > 20) throw ResourceError("alpha too large");
  const long long m = static_cast<long long>(alpha) << alpha;
  const long long ny = m + m * alpha;
  if (m * m * ny > static_cast<long long>(kMaxJointCells))
    throw ResourceError("revealed-group channel with alpha = " + std::to_string(alpha) +
                        " exceeds the table cap");
  const int mm = static_cast<int>(m);
  return MacChannel::deterministic(mm, mm, static_cast<int>(ny), [&](int x1, int x2) {
    const int g = x1 / alpha;
    if (g == x2 / alpha) return mm + g * alpha * alpha + (x1 % alpha) * alpha + (x2 % alpha);
    return (x1 + x2) % mm;
  });
}

// ---------------------------------------------------------------------------
// Known switching pattern

std::vector<double> block_probabilities(const FeedforwardProfile& profile, int B) {
  if (B < 1) throw ValidationError("B must be >= 1");
  return compute_switch_probs(profile, B);
}

std::vector<double> ksp_objective_by_b0(const std::vector<double>& p_bar,
                                        const std::vector<double>& i_cond_sum,
                                        const std::vector<double>& i_joint, double tw_sum) {
  const std::size_t B = p_bar.size();
  if (i_cond_sum.size() != B || i_joint.size() != B) throw ValidationError("block count mismatch");
  std::vector<double> v(B + 1);
  double suffix = 0.0;
  for (std::size_t b = 0; b < B; ++b) suffix += p_bar[b] * i_joint[b];
  double prefix = 0.0;
  for (std::size_t b0 = 0; b0 <= B; ++b0) {
    v[b0] = (prefix + suffix) / static_cast<double>(B);
    if (b0 < B) {
      prefix += (1.0 - p_bar[b0]) * tw_sum + p_bar[b0] * i_cond_sum[b0];
      suffix -= p_bar[b0] * i_joint[b0];
    }
  }
  return v;
}

namespace {

struct Assignment {
  double value = -1.0;
  std::vector<int> choice;
};

std::vector<int> pareto_indices(const std::vector<Candidate>& pool) {
  std::vector<int> keep;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const auto& a = pool[i].terms;
    bool dominated = false;
    for (std::size_t j = 0; j < pool.size() && !dominated; ++j) {
      if (j == i) continue;
      const auto& b = pool[j].terms;
      const bool ge = b.cond_sum >= a.cond_sum && b.joint >= a.joint;
      const bool gt = b.cond_sum > a.cond_sum || b.joint > a.joint;
      // Exact duplicates keep the earliest index.
      dominated = ge && (gt || j < i);
    }
    if (!dominated) keep.push_back(static_cast<int>(i));
  }
  return keep;
}

double min_objective(const std::vector<double>& p_bar, const std::vector<Candidate>& pool,
                     const std::vector<int>& choice, double tw) {
  std::vector<double> ic(p_bar.size()), ij(p_bar.size());
  for (std::size_t b = 0; b < p_bar.size(); ++b) {
    ic[b] = pool[choice[b]].terms.cond_sum;
    ij[b] = pool[choice[b]].terms.joint;
  }
  const auto v = ksp_objective_by_b0(p_bar, ic, ij, tw);
  return *std::min_element(v.begin(), v.end());
}

Assignment search_assignment(const std::vector<double>& p_bar, const std::vector<Candidate>& pool,
                             double tw, const KspOptions& opt, const std::vector<int>* warm) {
  const auto cand = pareto_indices(pool);
  const int B = static_cast<int>(p_bar.size());
  const int k = static_cast<int>(cand.size());
  Assignment best;
  auto consider = [&](const std::vector<int>& choice) {
    const double v = min_objective(p_bar, pool, choice, tw);
    if (v > best.value + 1e-15) best = {v, choice};
  };
  if (warm) consider(*warm);
  if (std::pow(static_cast<double>(k), B) <= opt.exhaustive_limit) {
    std::vector<int> digits(B, 0), choice(B);
    while (true) {
      for (int b = 0; b < B; ++b) choice[b] = cand[digits[b]];
      consider(choice);
      int b = B - 1;
      while (b >= 0 && ++digits[b] == k) digits[b--] = 0;
      if (b < 0) break;
    }
    return best;
  }
  // Coordinate ascent from constant assignments and seeded random ones.
  Rng rng = Rng(opt.region.seed).substream(0xC0A5);
  std::vector<std::vector<int>> starts;
  if (warm) starts.push_back(*warm);
  for (int i = 0; i < k; ++i) starts.emplace_back(B, cand[i]);
  for (int r = 0; r < opt.ascent_restarts; ++r) {
    std::vector<int> s(B);
    for (int& v : s) v = cand[static_cast<int>(rng.uniform() * k)];
    starts.push_back(std::move(s));
  }
  for (auto choice : starts) {
    double cur = min_objective(p_bar, pool, choice, tw);
    for (bool improved = true; improved;) {
      improved = false;
      for (int b = 0; b < B; ++b)
        for (int c : cand) {
          if (c == choice[b]) continue;
          const int old = choice[b];
          choice[b] = c;
          const double v = min_objective(p_bar, pool, choice, tw);
          if (v > cur + 1e-15) {
            cur = v;
            improved = true;
          } else {
            choice[b] = old;
          }
        }
    }
    consider(choice);
  }
  return best;
}

std::vector<KspBlock> blocks_from(const std::vector<double>& p_bar,
                                  const std::vector<Candidate>& pool,
                                  const std::vector<int>& choice) {
  std::vector<KspBlock> out;
  for (std::size_t b = 0; b < p_bar.size(); ++b) {
    const auto& c = pool[choice[b]];
    out.push_back({p_bar[b], c.dist, c.terms.cond_sum, c.terms.joint, c.terms.cond_1,
                   c.terms.cond_2});
  }
  return out;
}

int argmin_b0(const std::vector<KspBlock>& blocks, double tw) {
  std::vector<double> p, ic, ij;
  for (const auto& b : blocks) {
    p.push_back(b.p_bar);
    ic.push_back(b.i_cond_sum);
    ij.push_back(b.i_joint);
  }
  const auto v = ksp_objective_by_b0(p, ic, ij, tw);
  return static_cast<int>(std::min_element(v.begin(), v.end()) - v.begin()) + 1;
}

}  // namespace

KspEvaluation ksp_sum_capacity(const MacChannel& channel, const FeedforwardProfile& profile, int B,
                               const KspOptions& options, const std::vector<Candidate>* pool,
                               const TwoWayBounds* tw) {
  std::vector<Candidate> local_pool;
  if (!pool) {
    local_pool = structured_candidate_pool(channel, options.region);
    pool = &local_pool;
  }
  KspEvaluation ev{profile, B, {}, 1, 0.0, 0.0, {}, 1, {}};
  ev.tw_bounds = tw ? *tw : two_way_sum_bounds(channel, options.region.structured());
  const auto p_bar = block_probabilities(profile, B);
  const auto inner = search_assignment(p_bar, *pool, ev.tw_bounds.sum_inner, options, nullptr);
  const auto outer =
      search_assignment(p_bar, *pool, ev.tw_bounds.sum_outer, options, &inner.choice);
  ev.sum_value_inner = inner.value;
  ev.sum_value_outer = outer.value;
  ev.per_block = blocks_from(p_bar, *pool, inner.choice);
  ev.per_block_outer = blocks_from(p_bar, *pool, outer.choice);
  ev.tau_star = argmin_b0(ev.per_block, ev.tw_bounds.sum_inner);
  ev.tau_star_outer = argmin_b0(ev.per_block_outer, ev.tw_bounds.sum_outer);
  return ev;
}

CorollaryRegions corollary_region(const MacChannel& channel, double p,
                                  const RegionOptions& options, const std::vector<Candidate>* pool,
                                  const TwoWayBounds* tw) {
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("p_avg outside [0,1]");
  std::vector<Candidate> local_pool;
  if (!pool) {
    local_pool = structured_candidate_pool(channel, options);
    pool = &local_pool;
  }
  CorollaryRegions out;
  out.tw_bounds = tw ? *tw : two_way_sum_bounds(channel, options.structured());
  const auto& t = out.tw_bounds;
  std::vector<RatePoint> in_pts, out_pts;
  for (const auto& c : *pool) {
    const auto& v = c.terms;
    const double si = std::min((1 - p) * t.sum_inner + p * v.cond_sum, p * v.joint);
    const double so = std::min((1 - p) * t.sum_outer + p * v.cond_sum, p * v.joint);
    for (const auto& q : pentagon_corners((1 - p) * t.s1_inner + p * v.cond_1,
                                          (1 - p) * t.s2_inner + p * v.cond_2, si))
      in_pts.push_back(q);
    for (const auto& q : pentagon_corners((1 - p) * t.s1_outer + p * v.cond_1,
                                          (1 - p) * t.s2_outer + p * v.cond_2, so))
      out_pts.push_back(q);
  }
  const bool same = std::abs(t.sum_inner - t.sum_outer) <= 1e-6 &&
                    std::abs(t.s1_inner - t.s1_outer) <= 1e-6 &&
                    std::abs(t.s2_inner - t.s2_outer) <= 1e-6;
  out.inner = hull_region(in_pts, same ? RegionKind::exact : RegionKind::inner);
  out.outer = hull_region(out_pts, same ? RegionKind::exact : RegionKind::outer);
  return out;
}

Lemma1Result lemma1_finite_B_region(const MacChannel& channel, const FeedforwardProfile& profile,
                                    int B, double eps, double s1, double s2,
                                    const KspOptions& options, const std::vector<Candidate>* pool,
                                    const TwoWayBounds* tw) {
  if (!(eps > 0.0 && eps < 1.0)) throw ValidationError("epsilon must be in (0,1)");
  if (!(s1 >= 0.0 && s2 >= 0.0)) throw ValidationError("S1, S2 must be nonnegative");
  std::vector<Candidate> local_pool;
  if (!pool) {
    local_pool = structured_candidate_pool(channel, options.region);
    pool = &local_pool;
  }
  const TwoWayBounds bounds = tw ? *tw : two_way_sum_bounds(channel, options.region.structured());
  if (s1 + s2 > bounds.sum_inner + 1e-9)
    throw ValidationError("(S1, S2) exceeds the two-way inner sum bound " +
                          std::to_string(bounds.sum_inner));
  const auto p_bar = block_probabilities(profile, B);
  const double tw_eff = (1 - eps) * (s1 + s2);
  const auto best = search_assignment(p_bar, *pool, tw_eff, options, nullptr);
  Lemma1Result r;
  r.sum_value = best.value;
  r.per_block = blocks_from(p_bar, *pool, best.choice);
  r.tau_star = argmin_b0(r.per_block, tw_eff);
  for (const auto& b : r.per_block) {
    r.r1_bound += ((1 - eps) * (1 - b.p_bar) * s1 + b.p_bar * b.i_cond_1) / B;
    r.r2_bound += ((1 - eps) * (1 - b.p_bar) * s2 + b.p_bar * b.i_cond_2) / B;
  }
  r.region = hull_region(pentagon_corners(r.r1_bound, r.r2_bound, r.sum_value), RegionKind::inner);
  return r;
}

}  // namespace swfb
