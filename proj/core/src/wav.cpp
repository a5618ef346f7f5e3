// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The sasvkit Authors

#include "sasv/wav.hpp"

#include "sasv/audio.hpp"
#include "sasv/errors.hpp"
#include "sasv/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace sasv::audio {

void write_wav(const std::filesystem::path &path, const Waveform &w) {
  const uint32_t n = static_cast<uint32_t>(w.samples.size());
  const uint32_t data_bytes = n * 2;
  std::vector<unsigned char> out;
  out.reserve(44 + data_bytes);

  auto put_tag = [&out](const char *tag) {
    out.insert(out.end(), tag, tag + 4);
  };
  put_tag("RIFF");
  io::put_u32(out, 36 + data_bytes);
  put_tag("WAVE");
  put_tag("fmt ");
  io::put_u32(out, 16);
  out.push_back(1); // PCM
  out.push_back(0);
  out.push_back(1); // mono
  out.push_back(0);
  io::put_u32(out, static_cast<uint32_t>(w.sample_rate));
  io::put_u32(out, static_cast<uint32_t>(w.sample_rate) * 2); // byte rate
  out.push_back(2); // block align
  out.push_back(0);
  out.push_back(16); // bits per sample
  out.push_back(0);
  put_tag("data");
  io::put_u32(out, data_bytes);
  for (float x : w.samples) {
    double v = std::clamp(static_cast<double>(x), -1.0, 1.0);
    auto q = static_cast<int16_t>(std::lrint(v * 32767.0));
    out.push_back(static_cast<unsigned char>(q & 0xff));
    out.push_back(static_cast<unsigned char>((q >> 8) & 0xff));
  }
  io::write_file(path, out.data(), out.size());
}

Waveform read_wav(const std::filesystem::path &path) {
  auto bytes = io::read_file(path);
  if (bytes.size() < 44 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    throw IoError("not a RIFF/WAVE file: " + path.string());

  size_t pos = 12;
  uint16_t channels = 0, bits = 0;
  uint32_t rate = 0;
  const unsigned char *data = nullptr;
  uint32_t data_len = 0;
  while (pos + 8 <= bytes.size()) {
    const unsigned char *hdr = bytes.data() + pos;
    uint32_t len = io::get_u32(hdr + 4);
    if (std::memcmp(hdr, "fmt ", 4) == 0 && pos + 8 + 16 <= bytes.size()) {
      const unsigned char *f = hdr + 8;
      uint16_t fmt = static_cast<uint16_t>(f[0] | (f[1] << 8));
      channels = static_cast<uint16_t>(f[2] | (f[3] << 8));
      rate = io::get_u32(f + 4);
      bits = static_cast<uint16_t>(f[14] | (f[15] << 8));
      if (fmt != 1)
        throw IoError("unsupported WAV encoding (want PCM): " + path.string());
    } else if (std::memcmp(hdr, "data", 4) == 0) {
      data = hdr + 8;
      data_len = len;
    }
    pos += 8 + len + (len & 1);
  }
  if (!data)
    throw IoError("WAV data chunk missing: " + path.string());
  if (channels != 1 || bits != 16 || rate != kSampleRate)
    throw IoError("expected mono 16-bit 16 kHz PCM: " + path.string());

  Waveform w;
  w.sample_rate = static_cast<int>(rate);
  size_t n = data_len / 2;
  w.samples.resize(n);
  for (size_t i = 0; i < n; ++i) {
    auto v = static_cast<int16_t>(static_cast<uint16_t>(data[2 * i]) |
                                  (static_cast<uint16_t>(data[2 * i + 1]) << 8));
    w.samples[i] = static_cast<float>(v) / 32768.0f;
  }
  return w;
}

} // namespace sasv::audio
