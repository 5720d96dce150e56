#include "swfb/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include "swfb/errors.hpp"
#include "swfb/rng.hpp"

namespace swfb {

int resolve_u_size(const MacChannel& channel, int u_size) {
  if (u_size < 0) throw ValidationError("u_size must be >= 1");
  return u_size == 0 ? channel.input_count() + 1 : u_size;
}

JointOptResult max_joint_mi(const MacChannel& channel, double tol, int max_iterations) {
  if (!(tol > 0.0)) throw ValidationError("tol must be positive");
  const int nx = channel.input_count(), ny = channel.y_size();
  std::vector<double> p(nx, 1.0 / nx), q(ny), d(nx);
  double info = 0.0, gap = 0.0;
  for (int it = 0;; ++it) {
    std::fill(q.begin(), q.end(), 0.0);
    for (int x = 0; x < nx; ++x) {
      auto r = channel.row(x);
      for (int y = 0; y < ny; ++y) q[y] += p[x] * r[y];
    }
    double dmax = 0.0;
    info = 0.0;
    for (int x = 0; x < nx; ++x) {
      auto r = channel.row(x);
      double dx = 0.0;
      for (int y = 0; y < ny; ++y)
        if (r[y] > 0.0) dx += r[y] * std::log2(r[y] / q[y]);
      d[x] = dx;
      info += p[x] * dx;
      dmax = std::max(dmax, dx);
    }
    gap = std::max(0.0, dmax - info);
    if (gap < tol) return {info, p, it, gap};
    if (it >= max_iterations)
      throw ConvergenceError("Blahut-Arimoto did not reach tolerance", info, gap);
    double z = 0.0;
    // Shift exponents by dmax to avoid overflow.
    for (int x = 0; x < nx; ++x) {
      p[x] *= std::exp2(d[x] - dmax);
      z += p[x];
    }
    for (double& v : p) v /= z;
  }
}

InfoTerms evaluate_terms(const MacChannel& channel, const StructuredInputDist& dist) {
  dist.validate();
  if (dist.x1_size != channel.x1_size() || dist.x2_size != channel.x2_size())
    throw ValidationError("distribution does not match channel alphabets");
  const auto q = dist.joint();
  auto one = [&](double a, double b, double c, double d) {
    return EntropyCombination(channel, dist.u_size, structured_terms(a, b, c, d)).value(q);
  };
  InfoTerms t;
  t.cond_sum = std::max(0.0, one(1, 0, 0, 0));
  t.cond_1 = std::max(0.0, one(0, 1, 0, 0));
  t.cond_2 = std::max(0.0, one(0, 0, 1, 0));
  t.joint = std::max(0.0, one(0, 0, 0, 1));
  return t;
}

double evaluate_weighted(const ObjectiveWeights& w, const InfoTerms& t) noexcept {
  return w.cond_sum * t.cond_sum + w.cond_1 * t.cond_1 + w.cond_2 * t.cond_2 + w.joint * t.joint;
}

namespace {

struct Blocks {
  int U, n1, n2;
  std::vector<double> p, a, b;

  void to_joint(std::vector<double>& q) const {
    q.resize(static_cast<std::size_t>(U) * n1 * n2);
    std::size_t k = 0;
    for (int u = 0; u < U; ++u)
      for (int i = 0; i < n1; ++i)
        for (int j = 0; j < n2; ++j) q[k++] = p[u] * a[u * n1 + i] * b[u * n2 + j];
  }
};

// Block gradients from dF/dQ. The row gradients are conditional (not scaled by p_u).
void block_gradients(const Blocks& s, const std::vector<double>& G, std::vector<double>& gp,
                     std::vector<double>& ga, std::vector<double>& gb) {
  const int U = s.U, n1 = s.n1, n2 = s.n2;
  gp.assign(U, 0.0);
  ga.assign(static_cast<std::size_t>(U) * n1, 0.0);
  gb.assign(static_cast<std::size_t>(U) * n2, 0.0);
  for (int u = 0; u < U; ++u)
    for (int i = 0; i < n1; ++i)
      for (int j = 0; j < n2; ++j) {
        const double g = G[(static_cast<std::size_t>(u) * n1 + i) * n2 + j];
        const double ai = s.a[u * n1 + i], bj = s.b[u * n2 + j];
        gp[u] += ai * bj * g;
        ga[u * n1 + i] += bj * g;
        gb[u * n2 + j] += ai * g;
      }
}

double rows_gap(const std::vector<double>& p, const std::vector<double>& x,
                const std::vector<double>& g, int width) {
  double total = 0.0;
  for (std::size_t u = 0; u < p.size(); ++u)
    total += p[u] * simplex_gap(std::span(x).subspan(u * width, width),
                                std::span(g).subspan(u * width, width));
  return total;
}

void rows_step(const std::vector<double>& x, const std::vector<double>& g, int width, double eta,
               std::vector<double>& out) {
  out.resize(x.size());
  for (std::size_t u = 0; u < x.size() / width; ++u)
    mirror_step(std::span(x).subspan(u * width, width), std::span(g).subspan(u * width, width),
                eta, std::span(out).subspan(u * width, width));
}

StructuredInputDist to_dist(const Blocks& s) {
  StructuredInputDist d;
  d.u_size = s.U;
  d.x1_size = s.n1;
  d.x2_size = s.n2;
  d.p_u = s.p;
  d.p_x1_given_u = s.a;
  d.p_x2_given_u = s.b;
  // Renormalize against drift so validate() holds at 1e-12.
  auto norm = [](std::span<double> r) {
    const double z = std::accumulate(r.begin(), r.end(), 0.0);
    for (double& v : r) v /= z;
  };
  norm(d.p_u);
  for (int u = 0; u < s.U; ++u) {
    norm(std::span(d.p_x1_given_u).subspan(static_cast<std::size_t>(u) * s.n1, s.n1));
    norm(std::span(d.p_x2_given_u).subspan(static_cast<std::size_t>(u) * s.n2, s.n2));
  }
  return d;
}

std::vector<double> flat_table(const StructuredInputDist& d) {
  std::vector<double> t(d.p_u);
  t.insert(t.end(), d.p_x1_given_u.begin(), d.p_x1_given_u.end());
  t.insert(t.end(), d.p_x2_given_u.begin(), d.p_x2_given_u.end());
  return t;
}

void dirichlet_row(Rng& rng, std::span<double> row) {
  double z = 0.0;
  for (double& v : row) {
    v = -std::log1p(-rng.uniform()) + 1e-12;
    z += v;
  }
  for (double& v : row) v /= z;
}

StructuredInputDist random_start(const MacChannel& ch, int U, Rng rng) {
  StructuredInputDist d;
  d.u_size = U;
  d.x1_size = ch.x1_size();
  d.x2_size = ch.x2_size();
  d.p_u.resize(U);
  d.p_x1_given_u.resize(static_cast<std::size_t>(U) * d.x1_size);
  d.p_x2_given_u.resize(static_cast<std::size_t>(U) * d.x2_size);
  dirichlet_row(rng, d.p_u);
  for (int u = 0; u < U; ++u) {
    dirichlet_row(rng, std::span(d.p_x1_given_u).subspan(static_cast<std::size_t>(u) * d.x1_size, d.x1_size));
    dirichlet_row(rng, std::span(d.p_x2_given_u).subspan(static_cast<std::size_t>(u) * d.x2_size, d.x2_size));
  }
  return d;
}

StructuredInputDist uniform_start(const MacChannel& ch, int U) {
  StructuredInputDist d;
  d.u_size = U;
  d.x1_size = ch.x1_size();
  d.x2_size = ch.x2_size();
  d.p_u.assign(U, 1.0 / U);
  d.p_x1_given_u.assign(static_cast<std::size_t>(U) * d.x1_size, 1.0 / d.x1_size);
  d.p_x2_given_u.assign(static_cast<std::size_t>(U) * d.x2_size, 1.0 / d.x2_size);
  return d;
}

bool better(const StructuredOptResult& cand, const StructuredOptResult& best) {
  if (cand.value > best.value + 1e-12) return true;
  if (cand.value < best.value - 1e-12) return false;
  return flat_table(cand.argmax) < flat_table(best.argmax);
}

}  // namespace

StructuredInputDist structured_from_joint(std::span<const double> p_x1x2, int x1_size,
                                          int x2_size, int u_size) {
  constexpr double kSmooth = 1e-9;
  std::vector<int> order(p_x1x2.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int l, int r) { return p_x1x2[l] > p_x1x2[r]; });
  StructuredInputDist d;
  d.u_size = u_size;
  d.x1_size = x1_size;
  d.x2_size = x2_size;
  d.p_u.assign(u_size, 1e-12);
  d.p_x1_given_u.assign(static_cast<std::size_t>(u_size) * x1_size, 1.0 / x1_size);
  d.p_x2_given_u.assign(static_cast<std::size_t>(u_size) * x2_size, 1.0 / x2_size);
  for (int u = 0; u < u_size && u < static_cast<int>(order.size()); ++u) {
    const int x = order[u];
    if (p_x1x2[x] <= 0.0) break;
    d.p_u[u] += p_x1x2[x];
    for (int i = 0; i < x1_size; ++i)
      d.p_x1_given_u[u * x1_size + i] = i == x / x2_size ? 1.0 - kSmooth * (x1_size - 1) : kSmooth;
    for (int j = 0; j < x2_size; ++j)
      d.p_x2_given_u[u * x2_size + j] = j == x % x2_size ? 1.0 - kSmooth * (x2_size - 1) : kSmooth;
  }
  const double z = std::accumulate(d.p_u.begin(), d.p_u.end(), 0.0);
  for (double& v : d.p_u) v /= z;
  return d;
}

StructuredOptResult structured_ascent(const ObjectiveWeights& w, const MacChannel& channel,
                                      StructuredInputDist start, double tol, int max_iterations) {
  start.validate();
  const EntropyCombination f(channel, start.u_size,
                             structured_terms(w.cond_sum, w.cond_1, w.cond_2, w.joint));
  Blocks s{start.u_size, start.x1_size, start.x2_size, start.p_u, start.p_x1_given_u,
           start.p_x2_given_u};
  std::vector<double> q, G(f.dim()), Gt(f.dim()), gp, ga, gb;
  s.to_joint(q);
  double val = f.value_and_gradient(q, G);
  double eta_p = 1.0, eta_a = 1.0, eta_b = 1.0;
  double gap = 0.0;
  double checkpoint = val;
  int it = 0;

  // One monotone mirror step on a block; `which` selects p, a or b.
  auto try_block = [&](int which, const std::vector<double>& g, double& eta) {
    Blocks t = s;
    for (int tries = 0; tries < 60; ++tries) {
      if (which == 0) {
        t.p.resize(s.p.size());
        mirror_step(s.p, g, eta, t.p);
      } else if (which == 1) {
        rows_step(s.a, g, s.n1, eta, t.a);
      } else {
        rows_step(s.b, g, s.n2, eta, t.b);
      }
      t.to_joint(q);
      const double v = f.value_and_gradient(q, Gt);
      if (v >= val) {
        s = std::move(t);
        val = v;
        G.swap(Gt);
        eta = std::min(eta * 1.5, 1e6);
        return;
      }
      eta *= 0.5;
    }
  };

  for (; it < max_iterations; ++it) {
    block_gradients(s, G, gp, ga, gb);
    gap = simplex_gap(s.p, gp) + rows_gap(s.p, s.a, ga, s.n1) + rows_gap(s.p, s.b, gb, s.n2);
    if (gap < tol) break;
    try_block(0, gp, eta_p);
    block_gradients(s, G, gp, ga, gb);
    try_block(1, ga, eta_a);
    block_gradients(s, G, gp, ga, gb);
    try_block(2, gb, eta_b);
    if ((it + 1) % 200 == 0) {
      if (val - checkpoint <= 1e-13 * std::max(1.0, std::abs(val))) break;
      checkpoint = val;
    }
  }
  StructuredOptResult r;
  r.argmax = to_dist(s);
  r.iterations = it;
  r.gap_bound = gap;
  r.value = evaluate_weighted(w, evaluate_terms(channel, r.argmax));
  return r;
}

StructuredOptResult max_structured(const ObjectiveWeights& weights, const MacChannel& channel,
                                   const StructuredOptions& opt) {
  const int U = resolve_u_size(channel, opt.u_size);
  if (opt.restarts < 1) throw ValidationError("restarts must be >= 1");
  if (weights.cond_sum < 0 || weights.cond_1 < 0 || weights.cond_2 < 0 || weights.joint < 0)
    throw ValidationError("objective weights must be nonnegative");
  std::vector<StructuredInputDist> starts;
  starts.push_back(uniform_start(channel, U));
  if (opt.joint_seed && starts.size() < static_cast<std::size_t>(opt.restarts)) {
    const auto ba = max_joint_mi(channel, std::max(opt.tol * 1e-2, 1e-10), opt.max_iterations);
    starts.push_back(structured_from_joint(ba.argmax, channel.x1_size(), channel.x2_size(), U));
  }
  const Rng master(opt.seed);
  for (int r = static_cast<int>(starts.size()); r < opt.restarts; ++r)
    starts.push_back(random_start(channel, U, master.substream(r)));

  std::vector<StructuredOptResult> results(starts.size());
  auto work = [&](std::size_t from, std::size_t step) {
    for (std::size_t i = from; i < starts.size(); i += step)
      results[i] = structured_ascent(weights, channel, starts[i], opt.tol, opt.max_iterations);
  };
  const int threads = std::clamp(opt.threads, 1, static_cast<int>(starts.size()));
  if (threads == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
    for (auto& th : pool) th.join();
  }
  StructuredOptResult best = results.front();
  int total_iterations = 0;
  for (const auto& r : results) {
    total_iterations += r.iterations;
    if (better(r, best)) best = r;
  }
  best.iterations = total_iterations;
  return best;
}

double concave_joint_ascent(const MacChannel& channel, const std::vector<EntropyTerm>& terms,
                            std::vector<double>& p, double tol, int max_iterations,
                            double* gap_out) {
  const EntropyCombination f(channel, 1, terms);
  if (p.size() != f.dim()) throw ValidationError("joint input has wrong size");
  auto fn = [&](std::span<const double> x, std::span<double> g) {
    return f.value_and_gradient(x, g);
  };
  const auto r = simplex_ascent(fn, p, tol, max_iterations);
  if (gap_out) *gap_out = r.gap;
  return r.value;
}

TwoWayBounds two_way_sum_bounds(const MacChannel& channel, const StructuredOptions& opt) {
  TwoWayBounds out;
  const ObjectiveWeights w{0.0, 1.0, 1.0, 0.0};
  StructuredOptions inner_opt = opt;
  inner_opt.u_size = 1;
  auto inner = max_structured(w, channel, inner_opt);
  if (channel.x1_size() == 2 && channel.x2_size() == 2) {
    // Product Bernoulli grid, then ascent from the best cell.
    double best = -1.0;
    StructuredInputDist seed;
    for (int i = 0; i <= 100; ++i)
      for (int j = 0; j <= 100; ++j) {
        const double a = std::clamp(i / 100.0, 1e-9, 1 - 1e-9), b = std::clamp(j / 100.0, 1e-9, 1 - 1e-9);
        const double pa[2] = {1 - a, a}, pb[2] = {1 - b, b};
        auto d = StructuredInputDist::independent(pa, pb);
        const double v = evaluate_weighted(w, evaluate_terms(channel, d));
        if (v > best + 1e-12) {
          best = v;
          seed = d;
        }
      }
    auto r = structured_ascent(w, channel, seed, opt.tol, opt.max_iterations);
    if (r.value > inner.value + 1e-12) inner = r;
  }
  out.witness_inner = inner.argmax;
  const auto t = evaluate_terms(channel, inner.argmax);
  out.s1_inner = t.cond_1;
  out.s2_inner = t.cond_2;
  out.sum_inner = t.cond_1 + t.cond_2;

  const std::size_t nx = channel.input_count();
  auto joint_max = [&](double a, double b, std::vector<double>* witness) {
    std::vector<double> p(nx, 1.0 / nx);
    double gap = 0.0;
    const double v = concave_joint_ascent(channel, structured_terms(0, a, b, 0), p, opt.tol * 1e-2,
                                          opt.max_iterations, &gap);
    if (witness) *witness = p;
    return v + gap;
  };
  out.sum_outer = std::max(joint_max(1.0, 1.0, &out.witness_outer), out.sum_inner);
  out.s1_outer = std::max(joint_max(1.0, 0.0, nullptr), out.s1_inner);
  out.s2_outer = std::max(joint_max(0.0, 1.0, nullptr), out.s2_inner);
  return out;
}

std::string ClassCheck::describe() const {
  if (holds) return "class condition holds";
  const std::string who = first_ambiguous ? "x1" : "x2";
  const std::string other = first_ambiguous ? "x2" : "x1";
  return "y=" + std::to_string(y) + " with " + other + "=" + std::to_string(given) +
         " is reached by " + who + " in {" + std::to_string(a) + "," + std::to_string(b) + "}";
}

ClassCheck theorem1_class_check(const MacChannel& ch) {
  ClassCheck c;
  for (int j = 0; j < ch.x2_size(); ++j)
    for (int y = 0; y < ch.y_size(); ++y) {
      int seen = -1;
      for (int i = 0; i < ch.x1_size(); ++i) {
        if (ch(i, j, y) <= 0.0) continue;
        if (seen >= 0) return {false, y, j, seen, i, true};
        seen = i;
      }
    }
  for (int i = 0; i < ch.x1_size(); ++i)
    for (int y = 0; y < ch.y_size(); ++y) {
      int seen = -1;
      for (int j = 0; j < ch.x2_size(); ++j) {
        if (ch(i, j, y) <= 0.0) continue;
        if (seen >= 0) return {false, y, i, seen, j, false};
        seen = j;
      }
    }
  return c;
}

}  // namespace swfb
