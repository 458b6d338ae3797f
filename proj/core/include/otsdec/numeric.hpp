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

#include <cstdint>

namespace otsdec {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

inline u64 add_mod(u64 a, u64 b, u64 q) {
  u64 s = a + b;  // q < 2^62, no wrap
  return s >= q ? s - q : s;
}

inline u64 sub_mod(u64 a, u64 b, u64 q) { return a >= b ? a - b : a + q - b; }

inline u64 neg_mod(u64 a, u64 q) { return a == 0 ? 0 : q - a; }

inline u64 mul_mod(u64 a, u64 b, u64 q) {
  return static_cast<u64>((static_cast<u128>(a) * b) % q);
}

inline u64 pow_mod(u64 base, u64 exp, u64 q) {
  u64 r = 1 % q;
  base %= q;
  while (exp) {
    if (exp & 1) r = mul_mod(r, base, q);
    base = mul_mod(base, base, q);
    exp >>= 1;
  }
  return r;
}

/// Inverse of a mod prime q (Fermat).
inline u64 inv_mod_prime(u64 a, u64 q) { return pow_mod(a, q - 2, q); }

/// floor(w * 2^64 / q), the fixed-operand constant for Shoup multiplication.
inline u64 shoup_precompute(u64 w, u64 q) {
  return static_cast<u64>((static_cast<u128>(w) << 64) / q);
}

/// x * w mod q given w_shoup = floor(w * 2^64 / q). Result in [0, 2q).
inline u64 shoup_mul_lazy(u64 x, u64 w, u64 w_shoup, u64 q) {
  u64 hi = static_cast<u64>((static_cast<u128>(x) * w_shoup) >> 64);
  return x * w - hi * q;
}

inline u64 shoup_mul(u64 x, u64 w, u64 w_shoup, u64 q) {
  u64 r = shoup_mul_lazy(x, w, w_shoup, q);
  return r >= q ? r - q : r;
}

/// Deterministic Miller-Rabin, valid for all 64-bit inputs.
bool is_prime_u64(u64 n);

/// Smallest generator of the multiplicative group of F_q (q prime).
u64 find_generator(u64 q);

}  // namespace otsdec
