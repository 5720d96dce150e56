#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "swfb/channel.hpp"
#include "swfb/info.hpp"
#include "swfb/objective.hpp"

namespace swfb {

/// Maximizer over joint inputs P(x1, x2), laid out [x1][x2].
struct JointOptResult {
  double value = 0.0;
  std::vector<double> argmax;
  int iterations = 0;
  double gap_bound = 0.0;
};

struct StructuredOptResult {
  double value = 0.0;
  StructuredInputDist argmax;
  int iterations = 0;
  /// Sum of block Frank-Wolfe gaps at the returned point. Certifies only
  /// block-wise stationarity; the structured problem is nonconvex.
  double gap_bound = 0.0;
};

/// Weights on I(X1X2;Y|U), I(X1;Y|U,X2), I(X2;Y|U,X1), I(X1X2;Y).
struct ObjectiveWeights {
  double cond_sum = 0.0;
  double cond_1 = 0.0;
  double cond_2 = 0.0;
  double joint = 0.0;

  bool operator==(const ObjectiveWeights&) const = default;
};

struct StructuredOptions {
  /// 0 selects |X1||X2| + 1.
  int u_size = 0;
  int restarts = 32;
  double tol = 1e-7;
  int max_iterations = 100000;
  std::uint64_t seed = 0x5EEDULL;
  int threads = 1;
  /// Include the restart seeded from the joint-capacity maximizer.
  bool joint_seed = true;
};

int resolve_u_size(const MacChannel& channel, int u_size);

/// Blahut-Arimoto on the compound input (x1, x2). Throws ConvergenceError
/// past max_iterations.
JointOptResult max_joint_mi(const MacChannel& channel, double tol = 1e-9,
                            int max_iterations = 100000);

struct InfoTerms {
  double cond_sum = 0.0;  // I(X1X2;Y|U)
  double cond_1 = 0.0;    // I(X1;Y|U,X2)
  double cond_2 = 0.0;    // I(X2;Y|U,X1)
  double joint = 0.0;     // I(X1X2;Y)
};

InfoTerms evaluate_terms(const MacChannel& channel, const StructuredInputDist& dist);
double evaluate_weighted(const ObjectiveWeights& w, const InfoTerms& t) noexcept;

/// Alternating mirror ascent over (P(u), P(x1|u), P(x2|u)) with restarts.
/// The value is a lower bound on the structured maximum.
StructuredOptResult max_structured(const ObjectiveWeights& weights, const MacChannel& channel,
                                   const StructuredOptions& options = {});

/// Ascent from a given starting point; used by max_structured per restart.
StructuredOptResult structured_ascent(const ObjectiveWeights& weights, const MacChannel& channel,
                                      StructuredInputDist start, double tol, int max_iterations);

/// Starting point where U indexes the largest cells of a joint input.
StructuredInputDist structured_from_joint(std::span<const double> p_x1x2, int x1_size,
                                          int x2_size, int u_size);

struct TwoWayBounds {
  /// max over P(x1)P(x2) of I(X1;Y|X2) + I(X2;Y|X1); achievable.
  double sum_inner = 0.0;
  /// max over P(x1,x2) of the same sum plus the ascent's certified gap.
  double sum_outer = 0.0;
  StructuredInputDist witness_inner;
  /// I(X1;Y|X2) and I(X2;Y|X1) at the inner witness.
  double s1_inner = 0.0;
  double s2_inner = 0.0;
  /// Largest I(X1;Y|X2) and I(X2;Y|X1) over joint inputs (upper bounds on S1, S2).
  double s1_outer = 0.0;
  double s2_outer = 0.0;
  std::vector<double> witness_outer;
};

TwoWayBounds two_way_sum_bounds(const MacChannel& channel, const StructuredOptions& options = {});

struct ClassCheck {
  bool holds = true;
  /// Witness: output y and the fixed input value `given` for which inputs a != b of
  /// the other sender both reach y. `first_ambiguous` tells which sender is ambiguous.
  int y = -1;
  int given = -1;
  int a = -1;
  int b = -1;
  bool first_ambiguous = true;

  std::string describe() const;
};

ClassCheck theorem1_class_check(const MacChannel& channel);

/// Objective over joint inputs only: the same four terms with U trivial.
double concave_joint_ascent(const MacChannel& channel, const std::vector<EntropyTerm>& terms,
                            std::vector<double>& p, double tol, int max_iterations,
                            double* gap_out = nullptr);

}  // namespace swfb
