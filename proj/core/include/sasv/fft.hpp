// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The sasvkit Authors

#ifndef SASV_FFT_HPP
#define SASV_FFT_HPP

#include <complex>
#include <vector>

namespace sasv::fft {

/// In-place iterative radix-2 FFT. Size must be a power of two.
void fft(std::vector<std::complex<double>> &x, bool inverse = false);

/// Magnitude spectrum of a real signal zero-padded to n (power of two).
/// Returns n/2+1 magnitudes.
std::vector<double> real_magnitude(const std::vector<double> &signal, size_t n);

} // namespace sasv::fft

#endif
