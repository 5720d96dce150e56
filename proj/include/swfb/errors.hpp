#pragma once

#include <stdexcept>
#include <string>

namespace swfb {

/// Malformed input: bad documents, out-of-range symbols, invalid distributions.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An iterative solver hit its iteration cap. Carries the best value found
/// and the suboptimality bound at that point.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double best_value, double gap)
      : std::runtime_error(what), best_value_(best_value), gap_(gap) {}

  double best_value() const noexcept { return best_value_; }
  double gap() const noexcept { return gap_; }

 private:
  double best_value_;
  double gap_;
};

/// A configuration exceeds a memory or search cap.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace swfb
