// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The sasvkit Authors

#include "sasv/fft.hpp"

#include "sasv/errors.hpp"

#include <cmath>
#include <numbers>

namespace sasv::fft {

void fft(std::vector<std::complex<double>> &x, bool inverse) {
  const size_t n = x.size();
  if (n == 0 || (n & (n - 1)) != 0)
    throw DataError("fft size must be a power of two, got " +
                    std::to_string(n));

  // Bit-reversal permutation.
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1)
      j ^= bit;
    j ^= bit;
    if (i < j)
      std::swap(x[i], x[j]);
  }

  for (size_t len = 2; len <= n; len <<= 1) {
    const double ang =
        (inverse ? 2.0 : -2.0) * std::numbers::pi / static_cast<double>(len);
    const std::complex<double> wn(std::cos(ang), std::sin(ang));
    for (size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (size_t k = 0; k < len / 2; ++k) {
        std::complex<double> u = x[i + k];
        std::complex<double> v = x[i + k + len / 2] * w;
        x[i + k] = u + v;
        x[i + k + len / 2] = u - v;
        w *= wn;
      }
    }
  }
  if (inverse) {
    for (auto &v : x)
      v /= static_cast<double>(n);
  }
}

std::vector<double> real_magnitude(const std::vector<double> &signal, size_t n) {
  std::vector<std::complex<double>> buf(n, {0.0, 0.0});
  const size_t m = std::min(signal.size(), n);
  for (size_t i = 0; i < m; ++i)
    buf[i] = {signal[i], 0.0};
  fft(buf);
  std::vector<double> mag(n / 2 + 1);
  for (size_t i = 0; i < mag.size(); ++i)
    mag[i] = std::abs(buf[i]);
  return mag;
}

} // namespace sasv::fft
