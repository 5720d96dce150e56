#include "swfb/objective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "swfb/errors.hpp"

namespace swfb {

namespace {

constexpr double kLog2e = std::numbers::log2e;
// Masses below this are floored so gradient ratios keep their limits at the boundary.
constexpr double kFloor = 1e-300;

}  // namespace

EntropyCombination::EntropyCombination(const MacChannel& channel, int u_size,
                                       const std::vector<EntropyTerm>& terms)
    : u_size_(u_size),
      n1_(channel.x1_size()),
      n2_(channel.x2_size()),
      ny_(channel.y_size()),
      nx_(channel.input_count()) {
  if (u_size < 1) throw ValidationError("u_size must be >= 1");
  for (int x = 0; x < nx_; ++x) {
    auto r = channel.row(x);
    for (int y = 0; y < ny_; ++y)
      if (r[y] > 0.0) entries_.push_back({x, y, r[y]});
  }
  for (const auto& t : terms) {
    if (t.coef == 0.0) continue;
    auto it = std::find_if(masks_.begin(), masks_.end(),
                           [&](const MaskData& m) { return m.mask == t.mask; });
    if (it != masks_.end()) {
      it->coef += t.coef;
      continue;
    }
    MaskData m{t.coef, t.mask, 1, 0, 0, 0, 0};
    // Strides: Y fastest, then X2, X1, U.
    if (t.mask & kY) { m.sy = m.size; m.size *= ny_; }
    if (t.mask & kX2) { m.s2 = m.size; m.size *= n2_; }
    if (t.mask & kX1) { m.s1 = m.size; m.size *= n1_; }
    if (t.mask & kU) { m.su = m.size; m.size *= u_size_; }
    masks_.push_back(m);
  }
  std::erase_if(masks_, [](const MaskData& m) { return m.coef == 0.0; });
  scratch_.resize(masks_.size());
  for (std::size_t k = 0; k < masks_.size(); ++k) scratch_[k].assign(masks_[k].size, 0.0);
}

void EntropyCombination::marginals(std::span<const double> q) const {
  for (std::size_t k = 0; k < masks_.size(); ++k) {
    const auto& m = masks_[k];
    auto& buf = scratch_[k];
    std::fill(buf.begin(), buf.end(), 0.0);
    for (int u = 0; u < u_size_; ++u) {
      const std::size_t base_u = static_cast<std::size_t>(u) * nx_;
      for (const auto& e : entries_) {
        const double qv = std::max(q[base_u + e.x], kFloor);
        const std::size_t idx =
            u * m.su + (e.x / n2_) * m.s1 + (e.x % n2_) * m.s2 + static_cast<std::size_t>(e.y) * m.sy;
        buf[idx] += qv * e.w;
      }
    }
  }
}

double EntropyCombination::value(std::span<const double> q) const {
  if (q.size() != dim()) throw ValidationError("objective dimension mismatch");
  marginals(q);
  double f = 0.0;
  for (std::size_t k = 0; k < masks_.size(); ++k) {
    double h = 0.0;
    for (double v : scratch_[k])
      if (v > 0.0) h -= v * std::log2(v);
    f += masks_[k].coef * h;
  }
  return f;
}

double EntropyCombination::value_and_gradient(std::span<const double> q,
                                              std::span<double> grad) const {
  const double f = value(q);
  std::fill(grad.begin(), grad.end(), 0.0);
  for (std::size_t k = 0; k < masks_.size(); ++k) {
    const auto& m = masks_[k];
    const auto& buf = scratch_[k];
    for (int u = 0; u < u_size_; ++u) {
      const std::size_t base_u = static_cast<std::size_t>(u) * nx_;
      for (const auto& e : entries_) {
        const std::size_t idx =
            u * m.su + (e.x / n2_) * m.s1 + (e.x % n2_) * m.s2 + static_cast<std::size_t>(e.y) * m.sy;
        grad[base_u + e.x] -= m.coef * e.w * (std::log2(buf[idx]) + kLog2e);
      }
    }
  }
  return f;
}

std::vector<EntropyTerm> structured_terms(double w_cu, double w_1, double w_2, double w_joint) {
  std::vector<EntropyTerm> t;
  const unsigned X = kX1 | kX2;
  // I(X1X2;Y|U) = H(UY) - H(U) - H(UX1X2Y) + H(UX1X2)
  t.push_back({w_cu, kU | kY});
  t.push_back({-w_cu, kU});
  t.push_back({-w_cu, kU | X | kY});
  t.push_back({w_cu, kU | X});
  // I(X1;Y|U,X2) = H(UX2Y) - H(UX2) - H(UX1X2Y) + H(UX1X2)
  t.push_back({w_1, kU | kX2 | kY});
  t.push_back({-w_1, kU | kX2});
  t.push_back({-w_1, kU | X | kY});
  t.push_back({w_1, kU | X});
  t.push_back({w_2, kU | kX1 | kY});
  t.push_back({-w_2, kU | kX1});
  t.push_back({-w_2, kU | X | kY});
  t.push_back({w_2, kU | X});
  // I(X1X2;Y) = H(Y) - H(X1X2Y) + H(X1X2)
  t.push_back({w_joint, kY});
  t.push_back({-w_joint, X | kY});
  t.push_back({w_joint, X});
  return t;
}

void mirror_step(std::span<const double> x, std::span<const double> g, double eta,
                 std::span<double> out) noexcept {
  double gmax = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] > 0.0) gmax = std::max(gmax, g[i]);
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = x[i] > 0.0 ? x[i] * std::exp(eta * (g[i] - gmax)) : 0.0;
    s += out[i];
  }
  for (double& v : out) v /= s;
}

double simplex_gap(std::span<const double> x, std::span<const double> g) noexcept {
  double gmax = -std::numeric_limits<double>::infinity();
  double dot = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] <= 0.0) continue;
    gmax = std::max(gmax, g[i]);
    dot += x[i] * g[i];
  }
  return std::max(0.0, gmax - dot);
}

}  // namespace swfb
