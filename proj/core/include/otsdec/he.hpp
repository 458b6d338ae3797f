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

#include <memory>
#include <optional>
#include <vector>

#include "otsdec/bigpoly.hpp"
#include "otsdec/ring.hpp"

namespace otsdec {

/// BFV-style scheme parameters. plain_modulus defaults to 65537 when the
/// coefficient modulus leaves enough rounding margin; otherwise it shrinks
/// to the largest power of two keeping the decryption failure probability
/// negligible (< 2^-40 per ciphertext, one homomorphic addition included).
struct HeParams {
  RingContextPtr ring;
  u64 plain_modulus = 0;
  mpz_class delta1;                  // floor(q_big / plain_modulus)
  std::vector<u64> delta1_mod_qi;    // per-limb image of delta1
  std::shared_ptr<const CrtReconstructor> crt;

  const RingContext& ctx() const { return *ring; }
};

HeParams make_he_params(RingContextPtr ring, u64 plain_modulus = 0);

/// Smallest delta1 with negligible rounding-failure probability at degree d.
u64 min_delta1_for_degree(std::uint32_t d);

struct SecretKey {
  RnsPoly s;          // ternary, COEFF domain
  RnsPoly s_ntt;      // cached evaluation form
  std::vector<u64> s_ntt_shoup;  // per-residue Shoup constants, limb-major
};

struct PublicKey {
  RnsPoly a_ntt;  // uniform
  RnsPoly b_ntt;  // -a*s + e
};

struct Plaintext {
  std::vector<u64> values;  // each < plain_modulus

  bool operator==(const Plaintext&) const = default;
};

struct Ciphertext {
  RnsPoly u;  // COEFF
  RnsPoly v;  // COEFF
  std::optional<double> noise_budget_hint;  // diagnostic only, never wired
};

/// Remaining rounding margin in bits: log2(delta1/2) minus the log2 of the
/// centered residual of u*s + v around the nearest delta1-multiple. Needs
/// the secret key; zero or negative means decryption is about to corrupt.
double noise_budget_bits(const HeParams& params, const SecretKey& sk,
                         const Ciphertext& ct);

struct KeyPair {
  PublicKey pk;
  SecretKey sk;
};

KeyPair keygen(const HeParams& params, Rng& rng);

/// Deterministic encryption core with caller-provided randomness; encrypt()
/// samples (r, e2, e3) and delegates here. Test hooks force degenerate
/// values through this entry point.
Ciphertext encrypt_with(const HeParams& params, const PublicKey& pk,
                        const Plaintext& m, const RnsPoly& r_ternary,
                        const RnsPoly& e2, const RnsPoly& e3);

Ciphertext encrypt(const HeParams& params, const PublicKey& pk,
                   const Plaintext& m, Rng& rng);

/// Baseline decryption: w = u*s + v via the cached NTT key, CRT lift,
/// rounded scaling by plain_modulus / q.
Plaintext decrypt(const HeParams& params, const SecretKey& sk,
                  const Ciphertext& ct, OpCounter* ops = nullptr);

/// Reuse-friendly variant for benchmark loops.
void decrypt_into(const HeParams& params, const SecretKey& sk,
                  const Ciphertext& ct, Plaintext& out,
                  OpCounter* ops = nullptr);

/// Component-wise ciphertext addition (additive homomorphism mod p).
Ciphertext eval_add(const Ciphertext& a, const Ciphertext& b);

Plaintext random_plaintext(const HeParams& params, Rng& rng);

/// Shared BFV decode: rounded scaling of a COEFF-domain w.
Plaintext decode_plaintext(const HeParams& params, const RnsPoly& w,
                           OpCounter* ops = nullptr);

/// Rebuild the cached evaluation form (after deserializing a COEFF key).
void refresh_secret_key_cache(const HeParams& params, SecretKey& sk);

}  // namespace otsdec
