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

#include <gmpxx.h>

#include <vector>

#include "otsdec/ring.hpp"

namespace otsdec {

/// Exact big-integer coefficient view of a ring element, each coefficient
/// the unique representative in [0, prod q_i).
struct BigCoeffPoly {
  std::vector<mpz_class> coeffs;
};

/// CRT lift of a coefficient-domain polynomial.
BigCoeffPoly crt_reconstruct(const RnsPoly& p);

/// Inverse of crt_reconstruct; coefficients reduced into each limb.
RnsPoly crt_decompose(const BigCoeffPoly& big, const RingContextPtr& ctx);

/// Precomputed CRT machinery reused across many reconstructions. Also owns
/// the fixed-width fast paths used by decryption decode (L == 1 and L == 2
/// avoid GMP entirely).
class CrtReconstructor {
 public:
  explicit CrtReconstructor(RingContextPtr ctx);

  const RingContextPtr& ring() const { return ctx_; }

  /// coefficient j of p lifted to [0, q_big); GMP path, any L.
  void lift(const RnsPoly& p, std::uint32_t j, mpz_class& out) const;

  /// Rounded scaling round(plain * w / q_big) mod plain for every
  /// coefficient of p (coefficient domain). Half-up tie break.
  void scale_round(const RnsPoly& p, u64 plain_modulus,
                   std::vector<u64>& out, OpCounter* ops = nullptr) const;

 private:
  RingContextPtr ctx_;
  std::vector<mpz_class> hat_;        // q_big / q_i
  std::vector<u64> hat_inv_;          // (q_big/q_i)^{-1} mod q_i
  std::vector<u64> hat_inv_shoup_;
  // L == 2 fast path
  u64 q0_inv_mod_q1_ = 0;
};

}  // namespace otsdec
