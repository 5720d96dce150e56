#include "swfb/rng.hpp"

namespace swfb {

int sample_index(std::span<const double> probs, double u) noexcept {
  double acc = 0.0;
  int last_positive = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    last_positive = static_cast<int>(i);
    acc += probs[i];
    if (u < acc) return last_positive;
  }
  return last_positive;
}

int Rng::categorical(std::span<const double> probs) noexcept {
  return sample_index(probs, uniform());
}

}  // namespace swfb
