// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The sasvkit Authors

#include "sasv/rng.hpp"

#include <cmath>
#include <numbers>

namespace sasv {

namespace {

// splitmix64, used for seeding and stream derivation.
uint64_t splitmix64(uint64_t &x) {
  x += 0x9e3779b97f4a7c15ull;
  uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

} // namespace

uint64_t fnv1a64(const void *data, size_t n, uint64_t seed) {
  const auto *p = static_cast<const unsigned char *>(data);
  uint64_t h = seed;
  for (size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

uint64_t fnv1a64(std::string_view bytes) {
  return fnv1a64(bytes.data(), bytes.size());
}

Rng::Rng(uint64_t seed) {
  uint64_t x = seed;
  for (auto &w : s_)
    w = splitmix64(x);
}

Rng Rng::sub(std::string_view name) const {
  // Combine the stream's seed words with the name hash; ignores draw history.
  uint64_t h = fnv1a64(name);
  uint64_t x = s_[0] ^ rotl(s_[1], 17) ^ rotl(s_[2], 31) ^ s_[3] ^ h;
  return Rng(x);
}

Rng Rng::sub(std::string_view name, uint64_t index) const {
  uint64_t h = fnv1a64(name) ^ (0x9e3779b97f4a7c15ull * (index + 1));
  uint64_t x = s_[0] ^ rotl(s_[1], 17) ^ rotl(s_[2], 31) ^ s_[3] ^ h;
  return Rng(x);
}

// xoshiro256** step.
uint64_t Rng::u64() {
  uint64_t result = rotl(s_[1] * 5, 7) * 9;
  uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::uniform() {
  return static_cast<double>(u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform();
}

uint64_t Rng::uniform_int(uint64_t n) {
  // Multiply-shift bounded draw; bias is negligible for the n used here and
  // the mapping is fully deterministic.
  return static_cast<uint64_t>(
      (static_cast<__uint128_t>(u64()) * static_cast<__uint128_t>(n)) >> 64);
}

double Rng::normal() {
  if (have_cached_normal_) {
    have_cached_normal_ = false;
    return cached_normal_;
  }
  double u1 = uniform();
  double u2 = uniform();
  while (u1 <= 0.0) // log(0) guard
    u1 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double a = 2.0 * std::numbers::pi * u2;
  cached_normal_ = r * std::sin(a);
  have_cached_normal_ = true;
  return r * std::cos(a);
}

double Rng::normal(double mean, double stddev) {
  return mean + stddev * normal();
}

} // namespace sasv
