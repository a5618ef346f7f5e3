// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The sasvkit Authors

#include "sasv/audio.hpp"

#include "sasv/errors.hpp"
#include "sasv/fft.hpp"

#include <cmath>
#include <numbers>

namespace sasv::audio {

namespace {

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

// 64 triangular filters on the HTK Mel scale over 0..8000 Hz, evaluated on
// the kFftSize/2+1 bin grid. Built once.
struct MelFilterbank {
  // Per band: [start bin, end bin) and weights.
  struct Filter {
    int begin = 0;
    std::vector<double> weights;
  };
  std::vector<Filter> filters;

  MelFilterbank() {
    const int bins = kFftSize / 2 + 1;
    const double bin_hz = static_cast<double>(kSampleRate) / kFftSize;
    const double mel_lo = hz_to_mel(0.0);
    const double mel_hi = hz_to_mel(kSampleRate / 2.0);
    std::vector<double> edges(kNumMelBands + 2);
    for (int i = 0; i < kNumMelBands + 2; ++i)
      edges[i] =
          mel_to_hz(mel_lo + (mel_hi - mel_lo) * i / (kNumMelBands + 1.0));

    filters.resize(kNumMelBands);
    for (int b = 0; b < kNumMelBands; ++b) {
      const double lo = edges[b], mid = edges[b + 1], hi = edges[b + 2];
      int first = -1;
      std::vector<double> w;
      for (int k = 0; k < bins; ++k) {
        const double f = k * bin_hz;
        double v = 0.0;
        if (f > lo && f < mid)
          v = (f - lo) / (mid - lo);
        else if (f >= mid && f < hi)
          v = (hi - f) / (hi - mid);
        if (v > 0.0) {
          if (first < 0)
            first = k;
          w.push_back(v);
        } else if (first >= 0) {
          break;
        }
      }
      filters[b].begin = first < 0 ? 0 : first;
      filters[b].weights = std::move(w);
    }
  }
};

const MelFilterbank &mel_filterbank() {
  static const MelFilterbank fb;
  return fb;
}

// Hamming window of kFrameLength points.
const std::vector<double> &hamming_window() {
  static const std::vector<double> w = [] {
    std::vector<double> v(kFrameLength);
    for (int n = 0; n < kFrameLength; ++n)
      v[n] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * n /
                                    (kFrameLength - 1));
    return v;
  }();
  return w;
}

} // namespace

Waveform preemphasis(const Waveform &w, double coeff) {
  if (coeff < 0.0 || coeff >= 1.0)
    throw DataError("pre-emphasis coefficient must be in [0, 1), got " +
                    std::to_string(coeff));
  Waveform y;
  y.sample_rate = w.sample_rate;
  y.samples.resize(w.samples.size());
  if (w.samples.empty())
    return y;
  y.samples[0] = w.samples[0];
  const float c = static_cast<float>(coeff);
  for (size_t t = 1; t < w.samples.size(); ++t)
    y.samples[t] = w.samples[t] - c * w.samples[t - 1];
  return y;
}

FeatureMap log_mel_features(const Waveform &w) {
  const int frames = frame_count(w.samples.size());
  if (frames < 1)
    throw DataError("waveform too short for one 25 ms frame: " +
                    std::to_string(w.samples.size()) + " samples");

  const auto &window = hamming_window();
  const auto &fb = mel_filterbank();

  FeatureMap out;
  out.frames = frames;
  out.data.resize(static_cast<size_t>(frames) * kNumMelBands);

  std::vector<std::complex<double>> buf(kFftSize);
  std::vector<double> power(kFftSize / 2 + 1);
  for (int t = 0; t < frames; ++t) {
    const size_t off = static_cast<size_t>(t) * kFrameShift;
    for (int n = 0; n < kFrameLength; ++n)
      buf[n] = {static_cast<double>(w.samples[off + n]) * window[n], 0.0};
    for (int n = kFrameLength; n < kFftSize; ++n)
      buf[n] = {0.0, 0.0};
    fft::fft(buf);
    for (size_t k = 0; k < power.size(); ++k)
      power[k] = std::norm(buf[k]);
    for (int b = 0; b < kNumMelBands; ++b) {
      const auto &f = fb.filters[b];
      double e = 0.0;
      for (size_t i = 0; i < f.weights.size(); ++i)
        e += f.weights[i] * power[f.begin + i];
      out.at(t, b) = static_cast<float>(std::log(std::max(e, kLogFloor)));
    }
  }
  return out;
}

namespace {

Waveform tile_to(const Waveform &w, size_t n) {
  Waveform y;
  y.sample_rate = w.sample_rate;
  y.samples.resize(n);
  const size_t len = w.samples.size();
  for (size_t i = 0; i < n; ++i)
    y.samples[i] = w.samples[i % len];
  return y;
}

} // namespace

Waveform random_crop(const Waveform &w, size_t n_samples, Rng &rng) {
  if (n_samples < 1)
    throw DataError("random_crop needs n_samples >= 1");
  if (w.samples.empty())
    throw DataError("random_crop on empty waveform");
  if (w.samples.size() >= n_samples) {
    const size_t start = rng.uniform_int(w.samples.size() - n_samples + 1);
    Waveform y;
    y.sample_rate = w.sample_rate;
    y.samples.assign(w.samples.begin() + static_cast<long>(start),
                     w.samples.begin() + static_cast<long>(start + n_samples));
    return y;
  }
  // Tile to at least the requested length, then crop at a random offset.
  const size_t reps = (n_samples + w.samples.size() - 1) / w.samples.size();
  Waveform tiled = tile_to(w, reps * w.samples.size());
  const size_t start = rng.uniform_int(tiled.samples.size() - n_samples + 1);
  Waveform y;
  y.sample_rate = w.sample_rate;
  y.samples.assign(tiled.samples.begin() + static_cast<long>(start),
                   tiled.samples.begin() + static_cast<long>(start + n_samples));
  return y;
}

Waveform pad_or_crop(const Waveform &w, size_t n_samples) {
  if (n_samples < 1)
    throw DataError("pad_or_crop needs n_samples >= 1");
  if (w.samples.empty())
    throw DataError("pad_or_crop on empty waveform");
  Waveform y;
  y.sample_rate = w.sample_rate;
  if (w.samples.size() >= n_samples) {
    y.samples.assign(w.samples.begin(),
                     w.samples.begin() + static_cast<long>(n_samples));
    return y;
  }
  return tile_to(w, n_samples);
}

Waveform concat_enrolment(const std::vector<Waveform> &utterances,
                          double cap_seconds) {
  if (utterances.empty())
    throw DataError("concat_enrolment: empty utterance list");
  if (cap_seconds <= 0.0)
    throw DataError("concat_enrolment: cap_seconds must be positive");
  const size_t cap =
      static_cast<size_t>(std::llround(cap_seconds * kSampleRate));
  Waveform all;
  all.sample_rate = utterances.front().sample_rate;
  for (const auto &u : utterances) {
    all.samples.insert(all.samples.end(), u.samples.begin(), u.samples.end());
    if (all.samples.size() >= cap)
      break; // later utterances are dropped entirely by the truncation
  }
  return pad_or_crop(all, cap);
}

} // namespace sasv::audio
