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
#include <vector>

#include "otsdec/he.hpp"
#include "otsdec/ring.hpp"

namespace otsdec {

/// Sparse ring element: h strictly increasing coefficient positions, each
/// carrying one residue per limb (index-major storage: values[j*L + i] is
/// position j reduced mod q_i). Every stored residue is nonzero.
struct SparsePoly {
  RingContextPtr ring;
  std::uint32_t weight = 0;
  std::vector<std::uint32_t> indices;  // size weight, ascending
  std::vector<u64> values;             // size weight * L

  u64 value(std::uint32_t j, std::size_t limb) const {
    return values[std::size_t{j} * ring->limb_count() + limb];
  }
};

/// Dense expansion (COEFF domain).
RnsPoly densify(const SparsePoly& s);

/// Number of positions whose residue is nonzero in at least one limb.
std::uint32_t dense_weight(const RnsPoly& p_coeff);

/// The unblinding key, kept factored: t = product of `factors`; the dense
/// blinding key t_inv = product of the factor inverses. Factors are applied
/// one at a time during local decryption and are never densified outside
/// tests.
struct BlindingKeyPair {
  std::vector<SparsePoly> factors;
  RnsPoly t_inv;  // NTT domain on NTT-ready rings, COEFF otherwise

  std::uint32_t total_weight() const {
    std::uint32_t w = 0;
    for (const auto& f : factors) w += f.weight;
    return w;
  }
};

struct BlindedSecretKey {
  RnsPoly s_ntt;                 // s * t_inv, evaluation form
  std::vector<u64> s_ntt_shoup;  // per-residue constants, limb-major
};

struct BlindedCiphertext {
  RnsPoly u;  // u * s_tilde, COEFF domain
  RnsPoly v;  // passed through untouched
};

struct ProtocolParams {
  RingContextPtr ring;
  unsigned lambda = 0;
  std::uint32_t h = 0;   // target dense weight
  std::uint32_t h1 = 0, h2 = 0;
  std::uint64_t q2 = 2;
};

/// Parameterizes the blinding for a ring at a security target: smallest h
/// whose attack estimates meet lambda, h1 fixed at 6, h2 minimal under both
/// the weight bound and the enumeration gate. Throws InfeasibleParamsError.
ProtocolParams setup(const RingContextPtr& ring, unsigned lambda);

/// Ring-free variant for parameter studies; d and log2(q) given directly.
ProtocolParams setup_for(std::uint32_t d, double log2_q, unsigned lambda);

/// One sparse factor with its inverse: h positions uniform without
/// replacement, per-limb values uniform in [1, q_i), values resampled per
/// limb until the limb is invertible. Inverse comes back in NTT form on
/// NTT-ready rings (COEFF otherwise).
struct BlindingFactor {
  SparsePoly factor;
  RnsPoly inverse;
};
BlindingFactor make_blinding_factor(const RingContextPtr& ring,
                                    std::uint32_t h, Rng& rng);

/// Single-factor key pair.
BlindingKeyPair make_blinding_key(const RingContextPtr& ring, std::uint32_t h,
                                  Rng& rng);

/// Composite two-factor key: factor A full-range with weight h1, factor B
/// with weight h2 and values in [1, q2) lifted to every limb. The dense
/// weight of A*B is checked against h1*h2 - min(h1, h2).
BlindingKeyPair make_composite_blinding_key(const RingContextPtr& ring,
                                            std::uint32_t h1,
                                            std::uint32_t h2, std::uint64_t q2,
                                            Rng& rng);

/// Key pair matching a ProtocolParams choice.
BlindingKeyPair make_blinding_key(const ProtocolParams& params, Rng& rng);

/// Identity blinding (t = 1); test and baseline hook.
BlindingKeyPair make_identity_blinding_key(const RingContextPtr& ring);

/// s_tilde = s * t_inv (one pointwise multiply in evaluation form).
BlindedSecretKey blind_secret_key(const SecretKey& sk,
                                  const BlindingKeyPair& pair);

/// Cloud-side half of decryption: (u * s_tilde, v).
BlindedCiphertext blind_decrypt(const BlindedSecretKey& key,
                                const Ciphertext& ct,
                                OpCounter* ops = nullptr);

enum class ReductionPath : std::uint8_t {
  kAuto = 0,
  kAccumulate128,  // products accumulate unreduced in 128 bits
  kAccumulate64,   // products reduced, sums accumulate unreduced in 64 bits
  kEager,          // reduce every step
};

/// Exact negacyclic sparse-by-dense product, computed as `weight` monomial
/// shift-scale-accumulate passes per limb with the modulus operation
/// deferred to one final sweep. Path selection honors the per-limb headroom
/// bounds log2(h) + 2 log2(q) <= 127 (128-bit) and log2(h) + log2(q) <= 63
/// (64-bit reduce-then-accumulate); when neither fits the eager path is
/// used. The 128-bit path degrades to plain 64-bit accumulators when the
/// raw products already fit. Counts weight*d + d scalar multiplies per
/// limb. Scratch space is thread-local, so concurrent calls are safe.
RnsPoly sparse_dense_mul(const SparsePoly& t, const RnsPoly& dense_coeff,
                         ReductionPath path = ReductionPath::kAuto,
                         OpCounter* ops = nullptr);

/// In-place variant: replaces `inout` with t * inout. Allocation-free after
/// the first call on a thread.
void sparse_dense_apply(const SparsePoly& t, RnsPoly& inout,
                        ReductionPath path = ReductionPath::kAuto,
                        OpCounter* ops = nullptr);

/// Client-side half: applies the sparse factors in sequence, adds v, then
/// performs the same rounded decode as baseline decryption.
Plaintext local_decrypt(const HeParams& params, const BlindingKeyPair& pair,
                        const BlindedCiphertext& bct,
                        OpCounter* ops = nullptr);

/// Reuse-friendly variant for benchmark loops.
void local_decrypt_into(const HeParams& params, const BlindingKeyPair& pair,
                        const BlindedCiphertext& bct, Plaintext& out,
                        OpCounter* ops = nullptr);

/// The pre-decode accumulator (u~ * t + v); exposed for equality tests
/// against the baseline inner product.
RnsPoly local_decrypt_accumulator(const BlindingKeyPair& pair,
                                  const BlindedCiphertext& bct,
                                  OpCounter* ops = nullptr);

}  // namespace otsdec
