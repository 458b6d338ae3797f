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

#include "otsdec/protocol.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "otsdec/estimator.hpp"

namespace otsdec {

namespace {

constexpr unsigned kResampleLimit = 1000;

std::vector<std::uint32_t> sample_support(std::uint32_t d, std::uint32_t h,
                                          Rng& rng) {
  // Partial Fisher-Yates over [0, d).
  std::vector<std::uint32_t> pool(d);
  for (std::uint32_t i = 0; i < d; ++i) pool[i] = i;
  for (std::uint32_t i = 0; i < h; ++i) {
    std::uint32_t j = i + static_cast<std::uint32_t>(rng.uniform_below(d - i));
    std::swap(pool[i], pool[j]);
  }
  std::vector<std::uint32_t> out(pool.begin(), pool.begin() + h);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<u64> shoup_table_for(const RnsPoly& p_ntt) {
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

/// Per-limb inversion of a sparse limb with value resampling. `fixed_values`
/// freezes the values (composite second factor with q2 = 2); then the
/// caller must resample positions instead.
std::optional<std::vector<u64>> invert_sparse_limb(
    const LimbContext& lc, std::uint32_t d,
    const std::vector<std::uint32_t>& idx, std::vector<u64>& vals, Rng& rng,
    bool resample_values) {
  std::vector<u64> dense(d, 0);
  for (unsigned attempt = 0; attempt < kResampleLimit; ++attempt) {
    std::fill(dense.begin(), dense.end(), 0);
    for (std::size_t j = 0; j < idx.size(); ++j) dense[idx[j]] = vals[j];
    if (lc.ntt) {
      std::vector<u64> evals = dense;
      ntt_forward_limb(lc, d, evals);
      bool ok = true;
      for (u64 v : evals)
        if (v == 0) {
          ok = false;
          break;
        }
      if (ok) {
        // pointwise inverse with one exponentiation
        std::vector<u64> pref(evals.size());
        u64 acc = 1;
        for (std::size_t j = 0; j < evals.size(); ++j) {
          pref[j] = acc;
          acc = mul_mod(acc, evals[j], lc.q);
        }
        u64 inv = inv_mod_prime(acc, lc.q);
        for (std::size_t j = evals.size(); j-- > 0;) {
          u64 orig = evals[j];
          evals[j] = mul_mod(inv, pref[j], lc.q);
          inv = mul_mod(inv, orig, lc.q);
        }
        return evals;  // NTT-domain inverse
      }
    } else {
      auto inv = euclid_invert_limb(dense, lc.q, d);
      if (inv) return inv;  // COEFF-domain inverse
    }
    if (!resample_values) return std::nullopt;
    for (auto& v : vals) v = rng.uniform_in(1, lc.q);
  }
  throw ContractError("blinding factor resampling limit exceeded");
}

}  // namespace

RnsPoly densify(const SparsePoly& s) {
  RnsPoly p(s.ring, Domain::kCoeff);
  const std::size_t L = s.ring->limb_count();
  for (std::size_t i = 0; i < L; ++i) {
    auto lb = p.limb(i);
    for (std::uint32_t j = 0; j < s.weight; ++j)
      lb[s.indices[j]] = s.value(j, i);
  }
  return p;
}

std::uint32_t dense_weight(const RnsPoly& p) {
  require(p.domain() == Domain::kCoeff, "dense_weight needs COEFF domain");
  const auto& ring = p.ring();
  std::uint32_t w = 0;
  for (std::uint32_t j = 0; j < ring.degree(); ++j) {
    for (std::size_t i = 0; i < ring.limb_count(); ++i) {
      if (p.limb(i)[j] != 0) {
        ++w;
        break;
      }
    }
  }
  return w;
}

BlindingFactor make_blinding_factor(const RingContextPtr& ring,
                                    std::uint32_t h, Rng& rng) {
  require(h >= 1 && h <= ring->degree(), "weight must be in [1, d]");
  const std::size_t L = ring->limb_count();
  SparsePoly sp;
  sp.ring = ring;
  sp.weight = h;
  sp.indices = sample_support(ring->degree(), h, rng);
  sp.values.assign(std::size_t{h} * L, 0);

  RnsPoly inv(ring, ring->ntt_ready() ? Domain::kNtt : Domain::kCoeff);
  for (std::size_t i = 0; i < L; ++i) {
    const auto& lc = ring->limb(i);
    std::vector<u64> vals(h);
    for (auto& v : vals) v = rng.uniform_in(1, lc.q);
    auto limb_inv = invert_sparse_limb(lc, ring->degree(), sp.indices, vals,
                                       rng, /*resample_values=*/true);
    require(limb_inv.has_value(), "unreachable: value resampling exhausted");
    for (std::uint32_t j = 0; j < h; ++j) sp.values[std::size_t{j} * L + i] = vals[j];
    std::copy(limb_inv->begin(), limb_inv->end(), inv.limb(i).begin());
  }
  return BlindingFactor{std::move(sp), std::move(inv)};
}

BlindingKeyPair make_blinding_key(const RingContextPtr& ring, std::uint32_t h,
                                  Rng& rng) {
  auto f = make_blinding_factor(ring, h, rng);
  BlindingKeyPair pair;
  pair.factors.push_back(std::move(f.factor));
  pair.t_inv = std::move(f.inverse);
  return pair;
}

BlindingKeyPair make_composite_blinding_key(const RingContextPtr& ring,
                                            std::uint32_t h1,
                                            std::uint32_t h2, std::uint64_t q2,
                                            Rng& rng) {
  require(ring->ntt_ready(), "composite keys require an NTT-ready ring");
  require(h1 >= 1 && h2 >= 1, "weights must be positive");
  for (std::size_t i = 0; i < ring->limb_count(); ++i)
    require(q2 >= 2 && q2 < ring->limb(i).q,
            "q2 must be in [2, min q_i)");

  auto a = make_blinding_factor(ring, h1, rng);

  const std::size_t L = ring->limb_count();
  const std::uint32_t d = ring->degree();
  const std::uint64_t bound =
      std::uint64_t{h1} * h2 - std::min(h1, h2);

  for (unsigned attempt = 0; attempt < kResampleLimit; ++attempt) {
    SparsePoly b;
    b.ring = ring;
    b.weight = h2;
    b.indices = sample_support(d, h2, rng);
    b.values.assign(std::size_t{h2} * L, 0);
    std::vector<u64> vals(h2);
    for (auto& v : vals) v = rng.uniform_in(1, q2);  // lifted to every limb

    RnsPoly b_inv(ring, Domain::kNtt);
    bool invertible = true;
    for (std::size_t i = 0; i < L; ++i) {
      std::vector<u64> vcopy = vals;
      auto limb_inv = invert_sparse_limb(ring->limb(i), d, b.indices, vcopy,
                                         rng, /*resample_values=*/false);
      if (!limb_inv) {
        invertible = false;
        break;
      }
      for (std::uint32_t j = 0; j < h2; ++j)
        b.values[std::size_t{j} * L + i] = vals[j];
      std::copy(limb_inv->begin(), limb_inv->end(), b_inv.limb(i).begin());
    }
    if (!invertible) continue;  // resample positions (values are pinned)

    // Dense-weight bound check on A*B.
    RnsPoly prod = sparse_dense_mul(b, densify(a.factor));
    if (dense_weight(prod) < bound) continue;

    BlindingKeyPair pair;
    pair.t_inv = pointwise_mul(a.inverse, b_inv);
    pair.factors.push_back(std::move(a.factor));
    pair.factors.push_back(std::move(b));
    return pair;
  }
  throw ContractError("composite blinding key resampling limit exceeded");
}

BlindingKeyPair make_blinding_key(const ProtocolParams& params, Rng& rng) {
  return make_composite_blinding_key(params.ring, params.h1, params.h2,
                                     params.q2, rng);
}

BlindingKeyPair make_identity_blinding_key(const RingContextPtr& ring) {
  SparsePoly one;
  one.ring = ring;
  one.weight = 1;
  one.indices = {0};
  one.values.assign(ring->limb_count(), 1);
  BlindingKeyPair pair;
  pair.factors.push_back(std::move(one));
  pair.t_inv = make_constant(ring, 1,
                             ring->ntt_ready() ? Domain::kNtt : Domain::kCoeff);
  return pair;
}

ProtocolParams setup(const RingContextPtr& ring, unsigned lambda) {
  ProtocolParams p = setup_for(ring->degree(), ring->log2_modulus(), lambda);
  p.ring = ring;
  return p;
}

ProtocolParams setup_for(std::uint32_t d, double log2q, unsigned lambda) {
  require(lambda == 128 || lambda == 192 || lambda == 256,
          "supported security targets: 128, 192, 256");
  const double q = std::exp2(log2q);

  ProtocolParams p;
  p.lambda = lambda;
  p.h1 = 6;
  p.q2 = 2;

  bool found = false;
  for (std::uint32_t h = 1; h <= d / 2; ++h) {
    if (zf_attack_bits(d, q, h).bits >= lambda &&
        mitm_bits(d, q, h) >= lambda) {
      p.h = h;
      found = true;
      break;
    }
  }
  if (!found)
    throw InfeasibleParamsError("no weight h <= d/2 meets the target");

  const double lambda_enum = std::min<double>(lambda, 128.0);
  std::uint32_t h2 = min_h2_for_weight(p.h1, p.h);
  while (composite_enum_bits(d, q, p.h1, h2, 2.0) < lambda_enum) {
    ++h2;
    require(h2 <= d, "enumeration gate unsatisfiable");
  }
  p.h2 = h2;
  return p;
}

BlindedSecretKey blind_secret_key(const SecretKey& sk,
                                  const BlindingKeyPair& pair) {
  require(!sk.s_ntt.empty(), "secret key cache missing");
  require(sk.s_ntt.ring().same_ring(pair.t_inv.ring()), "ring mismatch");
  require(pair.t_inv.domain() == Domain::kNtt,
          "blinding requires an NTT-form inverse");
  BlindedSecretKey out;
  out.s_ntt = pointwise_mul(sk.s_ntt, pair.t_inv);
  out.s_ntt_shoup = shoup_table_for(out.s_ntt);
  return out;
}

BlindedCiphertext blind_decrypt(const BlindedSecretKey& key,
                                const Ciphertext& ct, OpCounter* ops) {
  require(key.s_ntt.ring().same_ring(ct.u.ring()), "ring mismatch");
  const auto& ring = ct.u.ring();
  const std::uint32_t d = ring.degree();
  RnsPoly u = ct.u;
  ntt_forward_inplace(u);
  for (std::size_t i = 0; i < ring.limb_count(); ++i) {
    const u64 q = ring.limb(i).q;
    auto x = u.limb(i);
    auto s = key.s_ntt.limb(i);
    const u64* sh = key.s_ntt_shoup.data() + i * d;
    for (std::uint32_t j = 0; j < d; ++j)
      x[j] = shoup_mul(x[j], s[j], sh[j], q);
  }
  ntt_inverse_inplace(u);
  if (ops)
    ops->add((std::uint64_t{d} * ring.log2_degree() + 2 * d) *
             ring.limb_count());
  return BlindedCiphertext{std::move(u), ct.v};
}

// ---------------------------------------------------------------------------
// Sparse-by-dense multiplication
// ---------------------------------------------------------------------------

namespace {

unsigned ceil_log2_u32(std::uint32_t v) {
  return v <= 1 ? 0 : 64 - static_cast<unsigned>(std::countl_zero(
                               std::uint64_t{v} - 1));
}

ReductionPath pick_path(std::uint32_t h, u64 q) {
  const unsigned lh = ceil_log2_u32(h);
  const unsigned lq = std::bit_width(q);  // ceil(log2(q+1))
  if (lh + 2 * lq <= 127) return ReductionPath::kAccumulate128;
  if (lh + lq <= 63) return ReductionPath::kAccumulate64;
  return ReductionPath::kEager;
}

void check_path_fits(ReductionPath path, std::uint32_t h, u64 q) {
  const unsigned lh = ceil_log2_u32(h);
  const unsigned lq = std::bit_width(q);
  if (path == ReductionPath::kAccumulate128)
    require(lh + 2 * lq <= 127, "128-bit accumulator headroom exceeded");
  if (path == ReductionPath::kAccumulate64)
    require(lh + lq <= 63, "64-bit accumulator headroom exceeded");
}

}  // namespace

namespace {

struct SparseScratch {
  std::vector<u128> wide;
  std::vector<u64> narrow;
};
thread_local SparseScratch tls_sparse_scratch;

u64 barrett_reduce(u64 v, u64 q, u64 barrett64) {
  v -= q * static_cast<u64>((static_cast<u128>(v) * barrett64) >> 64);
  while (v >= q) v -= q;
  return v;
}

/// One limb of the product; `out` may alias `u` (accumulation runs fully in
/// scratch before the write-back).
void sparse_mul_limb(const LimbContext& lc, std::uint32_t d,
                     const SparsePoly& t, std::size_t limb_index,
                     std::span<const u64> u, std::span<u64> out,
                     ReductionPath path) {
  const u64 q = lc.q;
  const std::uint32_t h = t.weight;
  const unsigned lh = ceil_log2_u32(h);
  const unsigned lq = std::bit_width(q);
  auto& scratch = tls_sparse_scratch;

  switch (path) {
    case ReductionPath::kAccumulate128: {
      if (lh + 2 * lq <= 63) {
        // raw products already fit a 64-bit accumulator
        scratch.narrow.assign(d, 0);
        u64* acc = scratch.narrow.data();
        for (std::uint32_t l = 0; l < h; ++l) {
          const std::uint32_t k = t.indices[l];
          const u64 val = t.value(l, limb_index);
          for (std::uint32_t j = 0; j < k; ++j)
            acc[j] += val * (q - u[d - k + j]);
          for (std::uint32_t j = k; j < d; ++j) acc[j] += val * u[j - k];
        }
        for (std::uint32_t j = 0; j < d; ++j)
          out[j] = barrett_reduce(acc[j], q, lc.barrett64);
      } else {
        scratch.wide.assign(d, 0);
        u128* acc = scratch.wide.data();
        for (std::uint32_t l = 0; l < h; ++l) {
          const std::uint32_t k = t.indices[l];
          const u64 val = t.value(l, limb_index);
          for (std::uint32_t j = 0; j < k; ++j)
            acc[j] += static_cast<u128>(val) * (q - u[d - k + j]);
          for (std::uint32_t j = k; j < d; ++j)
            acc[j] += static_cast<u128>(val) * u[j - k];
        }
        for (std::uint32_t j = 0; j < d; ++j)
          out[j] = lc.reduce_u128(acc[j]);
      }
      break;
    }
    case ReductionPath::kAccumulate64: {
      scratch.narrow.assign(d, 0);
      u64* acc = scratch.narrow.data();
      for (std::uint32_t l = 0; l < h; ++l) {
        const std::uint32_t k = t.indices[l];
        const u64 val = t.value(l, limb_index);
        const u64 vs = shoup_precompute(val, q);
        for (std::uint32_t j = 0; j < k; ++j)
          acc[j] += q - shoup_mul(u[d - k + j], val, vs, q);
        for (std::uint32_t j = k; j < d; ++j)
          acc[j] += shoup_mul(u[j - k], val, vs, q);
      }
      for (std::uint32_t j = 0; j < d; ++j)
        out[j] = barrett_reduce(acc[j], q, lc.barrett64);
      break;
    }
    case ReductionPath::kEager: {
      scratch.narrow.assign(d, 0);
      u64* acc = scratch.narrow.data();
      for (std::uint32_t l = 0; l < h; ++l) {
        const std::uint32_t k = t.indices[l];
        const u64 val = t.value(l, limb_index);
        for (std::uint32_t j = 0; j < k; ++j)
          acc[j] = sub_mod(acc[j], mul_mod(val, u[d - k + j], q), q);
        for (std::uint32_t j = k; j < d; ++j)
          acc[j] = add_mod(acc[j], mul_mod(val, u[j - k], q), q);
      }
      std::copy(acc, acc + d, out.begin());
      break;
    }
    case ReductionPath::kAuto:
      break;  // resolved by the caller
  }
}

void sparse_mul_all_limbs(const SparsePoly& t, const RnsPoly& in,
                          RnsPoly& out, ReductionPath path, OpCounter* ops) {
  require(!in.empty(), "empty polynomial");
  require(in.domain() == Domain::kCoeff,
          "sparse_dense_mul operates in COEFF domain");
  require(t.ring->same_ring(in.ring()), "ring mismatch");
  const auto& ring = in.ring();
  const std::uint32_t d = ring.degree();
  for (std::size_t i = 0; i < ring.limb_count(); ++i) {
    const auto& lc = ring.limb(i);
    ReductionPath p =
        path == ReductionPath::kAuto ? pick_path(t.weight, lc.q) : path;
    check_path_fits(p, t.weight, lc.q);
    sparse_mul_limb(lc, d, t, i, in.limb(i), out.limb(i), p);
  }
  if (ops)
    ops->add((std::uint64_t{t.weight} * d + d) *
             ring.limb_count());  // products + final sweep
}

}  // namespace

RnsPoly sparse_dense_mul(const SparsePoly& t, const RnsPoly& dense,
                         ReductionPath path, OpCounter* ops) {
  RnsPoly out(dense.ring_ptr(), Domain::kCoeff);
  sparse_mul_all_limbs(t, dense, out, path, ops);
  return out;
}

void sparse_dense_apply(const SparsePoly& t, RnsPoly& inout,
                        ReductionPath path, OpCounter* ops) {
  sparse_mul_all_limbs(t, inout, inout, path, ops);
}

namespace {

/// Copy reusing the destination's storage when the rings match.
void assign_poly(RnsPoly& dst, const RnsPoly& src) {
  if (dst.empty() || !dst.ring().same_ring(src.ring())) {
    dst = src;
    return;
  }
  std::copy(src.values().begin(), src.values().end(), dst.values().begin());
  dst.set_domain(src.domain());
}

void accumulate_into(const BlindingKeyPair& pair, const BlindedCiphertext& bct,
                     RnsPoly& w, OpCounter* ops) {
  require(!pair.factors.empty(), "blinding key has no factors");
  require(bct.u.ring().same_ring(pair.t_inv.ring()), "ring mismatch");
  assign_poly(w, bct.u);
  for (const auto& f : pair.factors)
    sparse_dense_apply(f, w, ReductionPath::kAuto, ops);
  poly_add_inplace(w, bct.v);
}

}  // namespace

RnsPoly local_decrypt_accumulator(const BlindingKeyPair& pair,
                                  const BlindedCiphertext& bct,
                                  OpCounter* ops) {
  RnsPoly w;
  accumulate_into(pair, bct, w, ops);
  return w;
}

Plaintext local_decrypt(const HeParams& params, const BlindingKeyPair& pair,
                        const BlindedCiphertext& bct, OpCounter* ops) {
  Plaintext out;
  local_decrypt_into(params, pair, bct, out, ops);
  return out;
}

void local_decrypt_into(const HeParams& params, const BlindingKeyPair& pair,
                        const BlindedCiphertext& bct, Plaintext& out,
                        OpCounter* ops) {
  thread_local RnsPoly w;
  accumulate_into(pair, bct, w, ops);
  params.crt->scale_round(w, params.plain_modulus, out.values, nullptr);
}

}  // namespace otsdec
