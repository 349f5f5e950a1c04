#pragma once

#include <array>
#include <cstddef>

namespace glat {

/// Radical-inverse (Halton) point in [0,1)^N; deterministic off-grid samples.
template <int N>
std::array<double, N> halton(std::size_t index) {
  static constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13};
  std::array<double, N> out{};
  for (int d = 0; d < N; ++d) {
    const int base = kPrimes[d];
    double f = 1.0, r = 0.0;
    for (std::size_t i = index + 1; i > 0; i /= base) {
      f /= base;
      r += f * double(i % base);
    }
    out[d] = r;
  }
  return out;
}

}  // namespace glat
