// Copyright 2026 The otsdec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <bit>
#include <cstdint>
#include <random>

#include "otsdec/numeric.hpp"

namespace otsdec {

/// Seedable deterministic randomness source. Same seed, same platform or
/// not: identical output stream. Distribution helpers are hand-rolled
/// because std::uniform_int_distribution is implementation-defined.
class Rng {
 public:
  explicit Rng(u64 seed) : gen_(seed) {}

  u64 next_u64() { return gen_(); }

  /// Uniform in [0, bound), bound >= 1. Rejection sampling, no modulo bias.
  u64 uniform_below(u64 bound) {
    if (bound <= 1) return 0;
    // Accept values below the largest multiple of bound.
    u64 limit = bound * ((~u64{0}) / bound);
    for (;;) {
      u64 v = gen_();
      if (v < limit) return v % bound;
    }
  }

  /// Uniform in [lo, hi).
  u64 uniform_in(u64 lo, u64 hi) { return lo + uniform_below(hi - lo); }

  /// Centered binomial: popcount(a) - popcount(b) over eta-bit masks,
  /// variance eta/2. Returned as signed value in [-eta, eta].
  int centered_binomial(unsigned eta) {
    int acc = 0;
    unsigned left = eta;
    while (left > 0) {
      unsigned take = left > 32 ? 32 : left;
      u64 bits = gen_();
      u64 mask = (take == 64) ? ~u64{0} : ((u64{1} << take) - 1);
      acc += std::popcount(bits & mask);
      acc -= std::popcount((bits >> 32) & mask);
      left -= take;
    }
    return acc;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace otsdec
