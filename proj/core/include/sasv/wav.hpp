// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The sasvkit Authors

#ifndef SASV_WAV_HPP
#define SASV_WAV_HPP

#include <filesystem>
#include <vector>

namespace sasv::audio {

struct Waveform; // audio.hpp

/// Write a single-channel 16 kHz 16-bit PCM RIFF/WAVE file. Samples are
/// clamped to [-1, 1] and rounded to the nearest integer code.
void write_wav(const std::filesystem::path &path, const Waveform &w);

/// Read a file written by write_wav. Rejects anything that is not mono
/// 16-bit PCM at 16 kHz.
Waveform read_wav(const std::filesystem::path &path);

} // namespace sasv::audio

#endif
