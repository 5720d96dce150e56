#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "swfb/capacity.hpp"
#include "swfb/channel.hpp"

namespace swfb {

enum class RegionKind { inner, outer, exact };
std::string to_string(RegionKind kind);

/// a*R1 + b*R2 <= c
struct HalfPlane {
  double a;
  double b;
  double c;
  std::string label;
};

struct RatePoint {
  double r1;
  double r2;
};

struct RateRegion {
  RegionKind kind = RegionKind::inner;
  std::vector<HalfPlane> constraints;
  std::vector<RatePoint> frontier;

  bool contains(RatePoint p, double slack = 1e-9) const;
  /// max of w1*R1 + w2*R2 over the polygon, by vertex enumeration.
  double support(double w1, double w2) const;
  double sum_rate() const { return support(1.0, 1.0); }
  std::vector<RatePoint> vertices() const;
};

/// Downward-closed convex hull of the points and the origin. Constraints are the
/// hull facets plus the labelled R1, R2 and sum supports.
RateRegion hull_region(const std::vector<RatePoint>& points, RegionKind kind);

/// The five corners of {R1 <= c1, R2 <= c2, R1 + R2 <= csum, R >= 0}.
std::vector<RatePoint> pentagon_corners(double c1, double c2, double csum);

struct RegionOptions {
  int u_size = 0;
  int restarts = 32;
  double tol = 1e-7;
  int angles = 64;
  std::uint64_t seed = 0x5EEDULL;
  int threads = 1;

  StructuredOptions structured() const;
};

struct Candidate {
  StructuredInputDist dist;
  InfoTerms terms;
};

/// Structured distributions optimized along weight sweeps over the four
/// information terms, plus the joint-capacity seed.
std::vector<Candidate> structured_candidate_pool(const MacChannel& channel,
                                                 const RegionOptions& options);

RateRegion prop1_outer(const MacChannel& channel, const FeedforwardProfile& profile);

RateRegion prop2_inner(const MacChannel& channel, const FeedforwardProfile& profile,
                       const RegionOptions& options = {},
                       const std::vector<Candidate>* pool = nullptr);

struct ConditionReport {
  bool holds = false;
  double capacity = 0.0;
  double p_capacity = 0.0;
  /// max of max{H(X1|X2), H(X2|X1)} over inputs achieving capacity.
  double h_star = 0.0;
  double threshold = 0.0;
  /// max over P(x1,x2) of min{H(X1|X2), p I} and of min{H(X2|X1), p I}.
  double a1 = 0.0;
  double a2 = 0.0;
};

struct Theorem1Result {
  RateRegion region;
  ConditionReport report;
};

/// Throws ValidationError when the class check fails.
Theorem1Result theorem1_region(const MacChannel& channel, double p);
double theorem1_threshold(const MacChannel& channel);

/// max over inputs achieving capacity of H(X1|X2) (first = true) or H(X2|X1).
double max_conditional_entropy_at_capacity(const MacChannel& channel, bool first);
/// max over P(x1,x2) of min{H(Xi|Xj), p I(X1X2;Y)}.
double maxmin_entropy_rate(const MacChannel& channel, double p, bool first);

/// Inputs {0..m-1}, m = alpha 2^alpha; same-group pairs are revealed, others add mod m.
MacChannel build_example2(int alpha);

struct KspBlock {
  double p_bar = 0.0;
  StructuredInputDist dist;
  double i_cond_sum = 0.0;
  double i_joint = 0.0;
  double i_cond_1 = 0.0;
  double i_cond_2 = 0.0;
};

struct KspEvaluation {
  FeedforwardProfile profile;
  int B = 1;
  std::vector<KspBlock> per_block;
  /// Minimizing b0 in 1..B+1 at the inner solution.
  int tau_star = 1;
  double sum_value_inner = 0.0;
  double sum_value_outer = 0.0;
  std::vector<KspBlock> per_block_outer;
  int tau_star_outer = 1;
  TwoWayBounds tw_bounds;
};

/// Block averages of p(t) over B equal blocks.
std::vector<double> block_probabilities(const FeedforwardProfile& profile, int B);

/// Discretized objective at each b0 = 1..B+1 (returned index b0 - 1).
std::vector<double> ksp_objective_by_b0(const std::vector<double>& p_bar,
                                        const std::vector<double>& i_cond_sum,
                                        const std::vector<double>& i_joint, double tw_sum);

struct KspOptions {
  RegionOptions region;
  /// Assignments are enumerated exhaustively below this count, else coordinate ascent.
  double exhaustive_limit = 2e5;
  int ascent_restarts = 16;
};

KspEvaluation ksp_sum_capacity(const MacChannel& channel, const FeedforwardProfile& profile, int B,
                               const KspOptions& options = {},
                               const std::vector<Candidate>* pool = nullptr,
                               const TwoWayBounds* tw = nullptr);

struct CorollaryRegions {
  RateRegion inner;
  RateRegion outer;
  TwoWayBounds tw_bounds;
};

CorollaryRegions corollary_region(const MacChannel& channel, double p_avg,
                                  const RegionOptions& options = {},
                                  const std::vector<Candidate>* pool = nullptr,
                                  const TwoWayBounds* tw = nullptr);

struct Lemma1Result {
  RateRegion region;
  double sum_value = 0.0;
  double r1_bound = 0.0;
  double r2_bound = 0.0;
  int tau_star = 1;
  std::vector<KspBlock> per_block;
};

/// Throws ValidationError unless 0 < epsilon < 1 and S1 + S2 is within the
/// two-way inner sum bound.
Lemma1Result lemma1_finite_B_region(const MacChannel& channel, const FeedforwardProfile& profile,
                                    int B, double epsilon, double s1, double s2,
                                    const KspOptions& options = {},
                                    const std::vector<Candidate>* pool = nullptr,
                                    const TwoWayBounds* tw = nullptr);

}  // namespace swfb
