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

#include "otsdec/he.hpp"

#include <algorithm>
#include <cmath>

namespace otsdec {

namespace {

mpz_class mpz_from_u64(u64 v) {
  mpz_class out;
  mpz_import(out.get_mpz_t(), 1, 1, sizeof(v), 0, 0, &v);
  return out;
}

u64 mpz_mod_u64(const mpz_class& v, u64 q) {
  mpz_class r = v % mpz_from_u64(q);
  u64 out = 0;
  mpz_export(&out, nullptr, 1, sizeof(out), 0, 0, r.get_mpz_t());
  return out;
}

std::vector<u64> shoup_table(const RnsPoly& p_ntt) {
  const auto& ring = p_ntt.ring();
  std::vector<u64> t(std::size_t{ring.degree()} * ring.limb_count());
  for (std::size_t i = 0; i < ring.limb_count(); ++i) {
    const u64 q = ring.limb(i).q;
    auto lb = p_ntt.limb(i);
    for (std::uint32_t j = 0; j < ring.degree(); ++j)
      t[i * ring.degree() + j] = shoup_precompute(lb[j], q);
  }
  return t;
}

}  // namespace

u64 min_delta1_for_degree(std::uint32_t d) {
  // Noise coefficient std dev after one addition is below
  // sqrt(2 * (2*d*(2/3) + 1) * 10); 25 sigma of margin keeps the failure
  // probability far under 2^-40 per ciphertext.
  double sigma = std::sqrt(2.0 * (2.0 * d * (2.0 / 3.0) + 1.0) * 10.0);
  double need = 2.0 * 25.0 * sigma;
  u64 delta = 1;
  while (static_cast<double>(delta) < need) delta <<= 1;
  return delta;
}

namespace {

/// Exactness requires two budgets around the rounding threshold 1/2:
/// the noise term p*|noise|/q (covered by delta1 >= delta_min) and the
/// floor(q/p) scale bias, worth up to (p-1)(q mod p)/q, capped at 1/8.
bool plain_modulus_fits(const mpz_class& q_big, u64 p, u64 delta_min) {
  mpz_class pz = mpz_from_u64(p);
  if (q_big / pz < mpz_from_u64(delta_min)) return false;
  mpz_class scale_err = (q_big % pz) * mpz_from_u64(p - 1) * 8;
  return scale_err <= q_big;
}

}  // namespace

HeParams make_he_params(RingContextPtr ring, u64 plain_modulus) {
  require(ring != nullptr, "null ring");
  require(ring->ntt_ready(), "HE parameters require an NTT-ready ring");
  HeParams p;
  p.ring = std::move(ring);
  const mpz_class& q_big = p.ring->modulus_product();
  const u64 delta_min = min_delta1_for_degree(p.ring->degree());

  if (plain_modulus == 0) {
    if (plain_modulus_fits(q_big, 65537, delta_min)) {
      plain_modulus = 65537;
    } else {
      u64 cand = u64{1} << 16;
      while (cand >= 2 && !plain_modulus_fits(q_big, cand, delta_min))
        cand >>= 1;
      if (cand < 2)
        throw InfeasibleParamsError(
            "coefficient modulus leaves no room for any plaintext modulus");
      plain_modulus = cand;
    }
  }
  require(plain_modulus >= 2, "plaintext modulus must be at least 2");
  for (std::size_t i = 0; i < p.ring->limb_count(); ++i)
    require(plain_modulus < p.ring->limb(i).q,
            "plaintext modulus must be below every limb modulus");
  p.plain_modulus = plain_modulus;
  p.delta1 = q_big / mpz_from_u64(plain_modulus);
  require(plain_modulus_fits(q_big, plain_modulus, delta_min),
          "coefficient modulus too small for exact decryption at this p");
  p.delta1_mod_qi.resize(p.ring->limb_count());
  for (std::size_t i = 0; i < p.ring->limb_count(); ++i)
    p.delta1_mod_qi[i] = mpz_mod_u64(p.delta1, p.ring->limb(i).q);
  p.crt = std::make_shared<CrtReconstructor>(p.ring);
  return p;
}

void refresh_secret_key_cache(const HeParams& params, SecretKey& sk) {
  (void)params;
  sk.s_ntt = ntt_forward(sk.s);
  sk.s_ntt_shoup = shoup_table(sk.s_ntt);
}

KeyPair keygen(const HeParams& params, Rng& rng) {
  KeyPair kp;
  kp.sk.s = sample_ternary(params.ring, rng);
  refresh_secret_key_cache(params, kp.sk);

  kp.pk.a_ntt = sample_uniform(params.ring, rng, Domain::kNtt);
  RnsPoly e = sample_error(params.ring, rng);
  // b = -a*s + e
  RnsPoly as = pointwise_mul(kp.pk.a_ntt, kp.sk.s_ntt);
  RnsPoly b = poly_neg(as);
  ntt_forward_inplace(e);
  poly_add_inplace(b, e);
  kp.pk.b_ntt = std::move(b);
  return kp;
}

Ciphertext encrypt_with(const HeParams& params, const PublicKey& pk,
                        const Plaintext& m, const RnsPoly& r_ternary,
                        const RnsPoly& e2, const RnsPoly& e3) {
  const auto& ring = params.ctx();
  require(m.values.size() == ring.degree(), "plaintext length mismatch");
  RnsPoly r_ntt = ntt_forward(r_ternary);

  RnsPoly u = pointwise_mul(pk.a_ntt, r_ntt);
  ntt_inverse_inplace(u);
  poly_add_inplace(u, e2);

  RnsPoly v = pointwise_mul(pk.b_ntt, r_ntt);
  ntt_inverse_inplace(v);
  poly_add_inplace(v, e3);
  // + delta1 * m, per limb
  for (std::size_t i = 0; i < ring.limb_count(); ++i) {
    const u64 q = ring.limb(i).q;
    const u64 dmod = params.delta1_mod_qi[i];
    auto lb = v.limb(i);
    for (std::uint32_t j = 0; j < ring.degree(); ++j) {
      require(m.values[j] < params.plain_modulus, "plaintext value too large");
      lb[j] = add_mod(lb[j], mul_mod(dmod, m.values[j], q), q);
    }
  }
  return Ciphertext{std::move(u), std::move(v), std::nullopt};
}

Ciphertext encrypt(const HeParams& params, const PublicKey& pk,
                   const Plaintext& m, Rng& rng) {
  RnsPoly r = sample_ternary(params.ring, rng);
  RnsPoly e2 = sample_error(params.ring, rng);
  RnsPoly e3 = sample_error(params.ring, rng);
  return encrypt_with(params, pk, m, r, e2, e3);
}

Plaintext decode_plaintext(const HeParams& params, const RnsPoly& w,
                           OpCounter* ops) {
  Plaintext out;
  params.crt->scale_round(w, params.plain_modulus, out.values, ops);
  return out;
}

Plaintext decrypt(const HeParams& params, const SecretKey& sk,
                  const Ciphertext& ct, OpCounter* ops) {
  Plaintext out;
  decrypt_into(params, sk, ct, out, ops);
  return out;
}

namespace {
void assign_poly(RnsPoly& dst, const RnsPoly& src) {
  if (dst.empty() || !dst.ring().same_ring(src.ring())) {
    dst = src;
    return;
  }
  std::copy(src.values().begin(), src.values().end(), dst.values().begin());
  dst.set_domain(src.domain());
}
}  // namespace

void decrypt_into(const HeParams& params, const SecretKey& sk,
                  const Ciphertext& ct, Plaintext& out, OpCounter* ops) {
  const auto& ring = params.ctx();
  require(ct.u.ring().same_ring(ring), "ciphertext ring mismatch");
  const std::uint32_t d = ring.degree();

  thread_local RnsPoly w;
  assign_poly(w, ct.u);
  ntt_forward_inplace(w);
  // pointwise with cached Shoup table of s_ntt
  for (std::size_t i = 0; i < ring.limb_count(); ++i) {
    const u64 q = ring.limb(i).q;
    auto x = w.limb(i);
    auto s = sk.s_ntt.limb(i);
    const u64* sh = sk.s_ntt_shoup.data() + i * d;
    for (std::uint32_t j = 0; j < d; ++j)
      x[j] = shoup_mul(x[j], s[j], sh[j], q);
  }
  ntt_inverse_inplace(w);
  poly_add_inplace(w, ct.v);
  if (ops) {
    // forward + inverse butterflies, pointwise, inverse scale
    std::uint64_t per_limb = std::uint64_t{d} * ring.log2_degree() + 2 * d;
    ops->add(per_limb * ring.limb_count());
  }
  // Decode is shared by both decryption paths and stays outside the count.
  params.crt->scale_round(w, params.plain_modulus, out.values, nullptr);
}

Ciphertext eval_add(const Ciphertext& a, const Ciphertext& b) {
  return Ciphertext{poly_add(a.u, b.u), poly_add(a.v, b.v), std::nullopt};
}

double noise_budget_bits(const HeParams& params, const SecretKey& sk,
                         const Ciphertext& ct) {
  const auto& ring = params.ctx();
  RnsPoly w = poly_add(ntt_inverse(pointwise_mul(ntt_forward(ct.u),
                                                 sk.s_ntt)),
                       ct.v);
  // residual of each coefficient around the nearest delta1-multiple
  CrtReconstructor rec(params.ring);
  mpz_class lifted, r, half = params.delta1 / 2;
  mpz_class max_res = 0;
  for (std::uint32_t j = 0; j < ring.degree(); ++j) {
    rec.lift(w, j, lifted);
    r = lifted % params.delta1;
    if (r > half) r = params.delta1 - r;
    if (r > max_res) max_res = r;
  }
  double margin = mpz_get_d(half.get_mpz_t());
  double res = std::max(1.0, mpz_get_d(max_res.get_mpz_t()));
  return std::log2(margin) - std::log2(res);
}

Plaintext random_plaintext(const HeParams& params, Rng& rng) {
  Plaintext m;
  m.values.resize(params.ctx().degree());
  for (auto& v : m.values) v = rng.uniform_below(params.plain_modulus);
  return m;
}

}  // namespace otsdec
