#pragma once

#include <algorithm>
#include <vector>

#include "swfb/channel.hpp"
#include "swfb/rng.hpp"

namespace swfb::testing {

/// Random channel with roughly 30% zero entries; rounding slack goes to the largest entry.
inline MacChannel random_channel(Rng& rng, int n1, int n2, int ny) {
  std::vector<double> t(static_cast<std::size_t>(n1) * n2 * ny);
  for (int x = 0; x < n1 * n2; ++x) {
    auto row = t.begin() + static_cast<std::ptrdiff_t>(x) * ny;
    double z = 0;
    for (int y = 0; y < ny; ++y) z += (row[y] = rng.uniform() < 0.3 ? 0.0 : rng.uniform());
    if (z == 0) row[0] = z = 1;
    double s = 0;
    for (int y = 0; y < ny; ++y) s += (row[y] /= z);
    *std::max_element(row, row + ny) += 1.0 - s;
  }
  return MacChannel(n1, n2, ny, t);
}

}  // namespace swfb::testing
