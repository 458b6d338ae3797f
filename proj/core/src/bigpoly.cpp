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

#include "otsdec/bigpoly.hpp"

namespace otsdec {

namespace {

mpz_class mpz_from_u64(u64 v) {
  mpz_class out;
  mpz_import(out.get_mpz_t(), 1, 1, sizeof(v), 0, 0, &v);
  return out;
}

u64 mpz_mod_u64(const mpz_class& v, u64 q) {
  // q < 2^62 exceeds unsigned long range on LP64 only when q >= 2^32; use
  // a 64-bit friendly fdiv on the raw mpz.
  mpz_class r = v % mpz_from_u64(q);
  u64 out = 0;
  mpz_export(&out, nullptr, 1, sizeof(out), 0, 0, r.get_mpz_t());
  return out;
}

}  // namespace

CrtReconstructor::CrtReconstructor(RingContextPtr ctx) : ctx_(std::move(ctx)) {
  const auto& ring = *ctx_;
  const std::size_t L = ring.limb_count();
  hat_.resize(L);
  hat_inv_.resize(L);
  hat_inv_shoup_.resize(L);
  for (std::size_t i = 0; i < L; ++i) {
    const u64 q = ring.limb(i).q;
    hat_[i] = ring.modulus_product() / mpz_from_u64(q);
    u64 hat_mod = mpz_mod_u64(hat_[i], q);
    hat_inv_[i] = inv_mod_prime(hat_mod, q);
    hat_inv_shoup_[i] = shoup_precompute(hat_inv_[i], q);
  }
  if (L == 2) q0_inv_mod_q1_ = inv_mod_prime(ring.limb(0).q % ring.limb(1).q,
                                             ring.limb(1).q);
}

void CrtReconstructor::lift(const RnsPoly& p, std::uint32_t j,
                            mpz_class& out) const {
  const auto& ring = *ctx_;
  out = 0;
  for (std::size_t i = 0; i < ring.limb_count(); ++i) {
    const u64 q = ring.limb(i).q;
    u64 digit = shoup_mul(p.limb(i)[j], hat_inv_[i], hat_inv_shoup_[i], q);
    out += hat_[i] * mpz_from_u64(digit);
  }
  out %= ring.modulus_product();
}

namespace {

// 192-bit little helpers for the L == 2 decode path.
struct U192 {
  u64 w[3] = {0, 0, 0};
};

U192 mul_128_by_64(u128 a, u64 b) {
  u64 a0 = static_cast<u64>(a), a1 = static_cast<u64>(a >> 64);
  u128 p0 = static_cast<u128>(a0) * b;
  u128 p1 = static_cast<u128>(a1) * b;
  U192 r;
  r.w[0] = static_cast<u64>(p0);
  u128 mid = (p0 >> 64) + static_cast<u64>(p1);
  r.w[1] = static_cast<u64>(mid);
  r.w[2] = static_cast<u64>(p1 >> 64) + static_cast<u64>(mid >> 64);
  return r;
}

U192 add_u192(U192 a, u128 b) {
  u128 s0 = static_cast<u128>(a.w[0]) + static_cast<u64>(b);
  u128 s1 = static_cast<u128>(a.w[1]) + static_cast<u64>(b >> 64) +
            static_cast<u64>(s0 >> 64);
  U192 r;
  r.w[0] = static_cast<u64>(s0);
  r.w[1] = static_cast<u64>(s1);
  r.w[2] = a.w[2] + static_cast<u64>(s1 >> 64);
  return r;
}

int cmp_u192(const U192& a, const U192& b) {
  for (int i = 2; i >= 0; --i) {
    if (a.w[i] != b.w[i]) return a.w[i] < b.w[i] ? -1 : 1;
  }
  return 0;
}

}  // namespace

void CrtReconstructor::scale_round(const RnsPoly& p, u64 plain_modulus,
                                   std::vector<u64>& out,
                                   OpCounter* ops) const {
  require(p.domain() == Domain::kCoeff, "decode requires COEFF domain");
  const auto& ring = *ctx_;
  const std::uint32_t d = ring.degree();
  const std::size_t L = ring.limb_count();
  out.resize(d);

  if (L == 1) {
    const u64 q = ring.limb(0).q;
    auto lb = p.limb(0);
    for (std::uint32_t j = 0; j < d; ++j) {
      // round(plain * w / q) = floor((2*plain*w + q) / (2q)), half rounds up
      u128 num = static_cast<u128>(lb[j]) * (2 * plain_modulus) + q;
      out[j] = static_cast<u64>(num / (2 * q)) % plain_modulus;
    }
    if (ops) ops->add(d);
    return;
  }

  if (L == 2) {
    const u64 q0 = ring.limb(0).q, q1 = ring.limb(1).q;
    auto l0 = p.limb(0);
    auto l1 = p.limb(1);
    const u128 q_big = static_cast<u128>(q0) * q1;
    const u128 two_q = q_big << 1;  // q0, q1 < 2^62: fits 125 bits
    for (std::uint32_t j = 0; j < d; ++j) {
      // Garner: w = x0 + q0 * ((x1 - x0) * q0^{-1} mod q1)
      u64 t = mul_mod(sub_mod(l1[j] % q1, l0[j] % q1, q1), q0_inv_mod_q1_, q1);
      u128 w = static_cast<u128>(l0[j]) + static_cast<u128>(q0) * t;
      U192 num = add_u192(mul_128_by_64(w, 2 * plain_modulus), q_big);
      // quotient < plain_modulus + 1; binary search free: estimate + fix
      long double approx = (static_cast<long double>(num.w[2]) * 340282366920938463463374607431768211456.0L  /* 2^128 */
                            + static_cast<long double>(num.w[1]) * 18446744073709551616.0L
                            + static_cast<long double>(num.w[0])) /
                           (static_cast<long double>(two_q));
      u64 m = static_cast<u64>(approx);
      auto fits = [&](u64 cand) {
        return cmp_u192(mul_128_by_64(two_q, cand), num) <= 0;
      };
      while (m > 0 && !fits(m)) --m;
      while (fits(m + 1)) ++m;
      out[j] = m % plain_modulus;
    }
    if (ops) ops->add(std::uint64_t{d} * 2);
    return;
  }

  mpz_class w, num, den = ring.modulus_product() * 2;
  for (std::uint32_t j = 0; j < d; ++j) {
    lift(p, j, w);
    num = w * (2 * plain_modulus) + ring.modulus_product();
    mpz_class m = num / den;
    out[j] = mpz_get_ui(m.get_mpz_t()) % plain_modulus;
  }
  if (ops) ops->add(std::uint64_t{d} * L);
}

BigCoeffPoly crt_reconstruct(const RnsPoly& p) {
  require(!p.empty(), "empty polynomial");
  require(p.domain() == Domain::kCoeff, "crt_reconstruct requires COEFF");
  CrtReconstructor rec(p.ring_ptr());
  BigCoeffPoly big;
  big.coeffs.resize(p.ring().degree());
  for (std::uint32_t j = 0; j < p.ring().degree(); ++j)
    rec.lift(p, j, big.coeffs[j]);
  return big;
}

RnsPoly crt_decompose(const BigCoeffPoly& big, const RingContextPtr& ctx) {
  require(big.coeffs.size() == ctx->degree(), "coefficient count mismatch");
  RnsPoly p(ctx, Domain::kCoeff);
  for (std::size_t i = 0; i < ctx->limb_count(); ++i) {
    const u64 q = ctx->limb(i).q;
    mpz_class qz;
    mpz_import(qz.get_mpz_t(), 1, 1, sizeof(q), 0, 0, &q);
    auto lb = p.limb(i);
    for (std::uint32_t j = 0; j < ctx->degree(); ++j) {
      mpz_class r = big.coeffs[j] % qz;
      if (r < 0) r += qz;
      u64 v = 0;
      mpz_export(&v, nullptr, 1, sizeof(v), 0, 0, r.get_mpz_t());
      lb[j] = v;
    }
  }
  return p;
}

}  // namespace otsdec
