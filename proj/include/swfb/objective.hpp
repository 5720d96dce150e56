#pragma once

#include <span>
#include <vector>

#include "swfb/channel.hpp"

namespace swfb {

/// Variable masks over (U, X1, X2, Y).
enum VarMask : unsigned { kU = 1, kX1 = 2, kX2 = 4, kY = 8 };

struct EntropyTerm {
  double coef;
  unsigned mask;
};

/// f(Q) = sum_k coef_k * H(mask_k) evaluated on J(u,x1,x2,y) = Q(u,x1,x2) W(y|x1,x2).
/// Q is laid out [u][x1][x2]. Terms with the same mask are merged.
class EntropyCombination {
 public:
  EntropyCombination(const MacChannel& channel, int u_size, const std::vector<EntropyTerm>& terms);

  int u_size() const noexcept { return u_size_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(u_size_) * nx_; }

  double value(std::span<const double> q) const;
  /// Fills grad with df/dQ and returns f(Q).
  double value_and_gradient(std::span<const double> q, std::span<double> grad) const;

 private:
  struct Entry {
    int x;
    int y;
    double w;
  };
  struct MaskData {
    double coef;
    unsigned mask;
    std::size_t size;
    std::size_t su, s1, s2, sy;
  };

  void marginals(std::span<const double> q) const;

  int u_size_, n1_, n2_, ny_, nx_;
  std::vector<Entry> entries_;
  std::vector<MaskData> masks_;
  mutable std::vector<std::vector<double>> scratch_;
};

/// Terms for a weighted combination of I(X1X2;Y|U), I(X1;Y|U,X2), I(X2;Y|U,X1), I(X1X2;Y).
std::vector<EntropyTerm> structured_terms(double w_cu, double w_1, double w_2, double w_joint);

/// Exponentiated-gradient step on a simplex block: x <- x * exp(eta (g - max g)), renormalized.
void mirror_step(std::span<const double> x, std::span<const double> g, double eta,
                 std::span<double> out) noexcept;

/// Frank-Wolfe gap max_i g_i - <x, g> on a simplex block.
double simplex_gap(std::span<const double> x, std::span<const double> g) noexcept;

struct SimplexAscentResult {
  double value;
  double gap;
  int iterations;
  bool converged;
};

/// Monotone mirror ascent of a concave function over the simplex restricted to
/// entries where `x` starts positive. `f` fills the gradient and returns the value.
template <class F>
SimplexAscentResult simplex_ascent(F&& f, std::vector<double>& x, double tol, int max_iterations);

}  // namespace swfb

#include "swfb/objective_impl.hpp"
