#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "swfb/channel.hpp"

namespace swfb {

/// Dense alphabet products above this many cells are rejected.
inline constexpr std::size_t kMaxJointCells = 100'000'000;

struct Axis {
  std::string name;
  int size;

  bool operator==(const Axis&) const = default;
};

/// Probability table over a product alphabet, first axis slowest.
class JointDist {
 public:
  JointDist(std::vector<Axis> axes, std::vector<double> mass);

  const std::vector<Axis>& axes() const noexcept { return axes_; }
  const std::vector<double>& mass() const noexcept { return mass_; }
  std::size_t cell_count() const noexcept { return mass_.size(); }

  /// Position of a named axis; throws ValidationError if absent.
  int axis_index(const std::string& name) const;

  /// Marginal over the named axes, in the order given.
  JointDist marginal(const std::vector<std::string>& names) const;

 private:
  std::vector<Axis> axes_;
  std::vector<double> mass_;
};

/// P(u) P(x1|u) P(x2|u). Conditionals are stored row-major by u.
struct StructuredInputDist {
  int u_size = 1;
  int x1_size = 1;
  int x2_size = 1;
  std::vector<double> p_u;
  std::vector<double> p_x1_given_u;
  std::vector<double> p_x2_given_u;

  /// Throws ValidationError unless every row is stochastic within 1e-12.
  void validate() const;

  /// Q(u, x1, x2), laid out [u][x1][x2].
  std::vector<double> joint() const;
  /// P(x1, x2) = sum_u Q(u, x1, x2).
  std::vector<double> input_joint() const;

  /// Product distribution with U trivial.
  static StructuredInputDist independent(std::span<const double> p_x1, std::span<const double> p_x2);

  bool operator==(const StructuredInputDist&) const = default;
};

double entropy(const JointDist& dist, const std::vector<std::string>& vars);
double conditional_entropy(const JointDist& dist, const std::vector<std::string>& a,
                           const std::vector<std::string>& given);
/// I(A;B|C); `c` may be empty.
double conditional_mutual_information(const JointDist& dist, const std::vector<std::string>& a,
                                      const std::vector<std::string>& b,
                                      const std::vector<std::string>& c);

/// Shannon entropy in bits of a probability vector.
double entropy_bits(std::span<const double> p) noexcept;
/// Binary entropy function.
double h2(double q) noexcept;

/// Joint over (X1, X2, Y) for an input joint laid out [x1][x2].
JointDist channel_joint(const MacChannel& channel, std::span<const double> p_x1x2);

/// Joint over (U, X1, X2, Y, V, Yd, Ye) with V ~ Bernoulli(switch_p).
JointDist induced_joint(const MacChannel& channel, const StructuredInputDist& input,
                        double switch_p);

/// Joint over (X1, X2, Z, Yd) used by the simulation decoder. Z indexes
/// x1 * |X2| + x2 under feedback and |X1||X2| under feedforward.
JointDist decoder_joint(const MacChannel& channel, std::span<const double> p_x1x2,
                        double switch_p);

/// Empirical test: every cell a of the joint alphabet has
/// |count(a)/n - p(a)| <= epsilon * p(a). One sequence per axis of `reference`.
bool is_robustly_typical(const std::vector<std::span<const int>>& sequences,
                         const JointDist& reference, double epsilon);

/// Typicality of precomputed cell counts against a flat reference table.
bool counts_robustly_typical(std::span<const int> counts, std::span<const double> reference,
                             int n, double epsilon) noexcept;

}  // namespace swfb
