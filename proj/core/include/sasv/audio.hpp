// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The sasvkit Authors
//
// Waveform handling and the ASV feature pipeline: pre-emphasis followed by
// 64-band log Mel-filterbank energies over 25 ms Hamming windows with a
// 10 ms shift.

#ifndef SASV_AUDIO_HPP
#define SASV_AUDIO_HPP

#include "sasv/rng.hpp"

#include <cstddef>
#include <vector>

namespace sasv::audio {

inline constexpr int kSampleRate = 16000;
inline constexpr int kFrameLength = 400; // 25 ms
inline constexpr int kFrameShift = 160;  // 10 ms
inline constexpr int kNumMelBands = 64;
inline constexpr int kFftSize = 512;
inline constexpr double kLogFloor = 1e-6;
inline constexpr double kPreemphasisCoeff = 0.97;

/// Single-channel audio at the fixed 16 kHz project rate.
struct Waveform {
  std::vector<float> samples;
  int sample_rate = kSampleRate;

  size_t size() const { return samples.size(); }
  double duration_s() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

/// frames x 64 log Mel energies, row-major.
struct FeatureMap {
  int frames = 0;
  int bands = kNumMelBands;
  std::vector<float> data; // frames * bands

  float &at(int t, int b) { return data[static_cast<size_t>(t) * bands + b]; }
  float at(int t, int b) const {
    return data[static_cast<size_t>(t) * bands + b];
  }
};

/// y[0] = x[0], y[t] = x[t] - coeff * x[t-1]. Requires 0 <= coeff < 1.
Waveform preemphasis(const Waveform &w, double coeff = kPreemphasisCoeff);

/// Number of analysis frames for a waveform of `len` samples.
inline int frame_count(size_t len) {
  if (len < kFrameLength)
    return 0;
  return 1 + static_cast<int>((len - kFrameLength) / kFrameShift);
}

/// Log Mel-filterbank features. Pre-emphasis is NOT applied here; callers
/// compose preemphasis() explicitly. Throws DataError for inputs shorter
/// than one frame.
FeatureMap log_mel_features(const Waveform &w);

/// Crop to exactly n samples starting at a uniformly drawn offset. Inputs
/// shorter than n are tiled first.
Waveform random_crop(const Waveform &w, size_t n_samples, Rng &rng);

/// Deterministic variant: crop from the start; shorter inputs are tiled.
Waveform pad_or_crop(const Waveform &w, size_t n_samples);

/// Concatenate utterances in order and normalize the total duration to
/// exactly cap_seconds (truncate if longer, tile if shorter).
Waveform concat_enrolment(const std::vector<Waveform> &utterances,
                          double cap_seconds);

} // namespace sasv::audio

#endif
