// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The sasvkit Authors

#ifndef SASV_RNG_HPP
#define SASV_RNG_HPP

#include <cstdint>
#include <string_view>
#include <vector>

namespace sasv {

// Deterministic random source. All randomness in the library flows from a
// single root seed through named sub-streams (Rng::sub), so experiments are
// reproducible bit-for-bit. The generator and every distribution below are
// implemented here rather than with <random> distributions, whose output is
// implementation-defined.
class Rng {
public:
  explicit Rng(uint64_t seed);

  /// Derive an independent stream named `name` from this one. Derivation
  /// depends only on (state seed, name), not on draw history.
  Rng sub(std::string_view name) const;
  Rng sub(std::string_view name, uint64_t index) const;

  uint64_t u64();

  /// Uniform double in [0, 1).
  double uniform();
  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi);
  /// Uniform integer in [0, n). Requires n >= 1.
  uint64_t uniform_int(uint64_t n);
  /// Standard normal via Box-Muller (pair-cached).
  double normal();
  double normal(double mean, double stddev);

  template <typename T> void shuffle(std::vector<T> &v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(uniform_int(i));
      std::swap(v[i - 1], v[j]);
    }
  }

private:
  uint64_t s_[4];
  bool have_cached_normal_ = false;
  double cached_normal_ = 0.0;
};

/// FNV-1a 64-bit hash over a byte string.
uint64_t fnv1a64(std::string_view bytes);
uint64_t fnv1a64(const void *data, size_t n, uint64_t seed = 0xcbf29ce484222325ull);

} // namespace sasv

#endif
