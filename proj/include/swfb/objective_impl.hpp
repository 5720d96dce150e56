#pragma once

#include <algorithm>
#include <cmath>

namespace swfb {

template <class F>
SimplexAscentResult simplex_ascent(F&& f, std::vector<double>& x, double tol, int max_iterations) {
  const std::size_t d = x.size();
  std::vector<double> g(d), g_try(d), x_try(d);
  double val = f(std::span<const double>(x), std::span<double>(g));
  double eta = 1.0;
  double gap = simplex_gap(x, g);
  int it = 0;
  int stall = 0;
  for (; it < max_iterations && gap >= tol; ++it) {
    bool accepted = false;
    for (int tries = 0; tries < 60; ++tries) {
      mirror_step(x, g, eta, x_try);
      const double v = f(std::span<const double>(x_try), std::span<double>(g_try));
      if (v >= val) {
        stall = (v - val <= 1e-15 * std::max(1.0, std::abs(val))) ? stall + 1 : 0;
        x.swap(x_try);
        g.swap(g_try);
        val = v;
        eta = std::min(eta * 1.5, 1e6);
        accepted = true;
        break;
      }
      eta *= 0.5;
    }
    gap = simplex_gap(x, g);
    if (!accepted || stall > 50) break;
  }
  return {val, gap, it, gap < tol};
}

}  // namespace swfb
