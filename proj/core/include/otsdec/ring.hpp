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

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "otsdec/common.hpp"
#include "otsdec/numeric.hpp"
#include "otsdec/rng.hpp"

namespace otsdec {

enum class Domain : std::uint8_t { kCoeff = 0, kNtt = 1 };

/// Per-modulus state. NTT tables exist only when q == 1 (mod 2d); limbs
/// without them support coefficient-domain arithmetic and Euclidean
/// inversion but reject transform calls.
struct LimbContext {
  u64 q = 0;
  bool ntt = false;
  u64 barrett64 = 0;  // floor(2^64 / q)
  u64 r64 = 0;        // 2^64 mod q
  u64 r64_shoup = 0;
  // Powers of the primitive 2d-th root in bit-reversed order (forward),
  // and of its inverse (inverse transform). Index 0 unused.
  std::vector<u64> roots, roots_shoup;
  std::vector<u64> inv_roots, inv_roots_shoup;
  u64 n_inv = 0, n_inv_shoup = 0;

  /// Reduce a 128-bit accumulator to [0, q) without a 128-bit division.
  u64 reduce_u128(u128 v) const {
    u64 hi = static_cast<u64>(v >> 64);
    u64 lo = static_cast<u64>(v);
    u64 a = shoup_mul_lazy(hi, r64, r64_shoup, q);          // < 2q
    u64 b = lo - q * static_cast<u64>((static_cast<u128>(lo) * barrett64) >> 64);
    while (b >= q) b -= q;
    u64 s = a + b;  // < 3q < 2^64
    while (s >= q) s -= q;
    return s;
  }
};

/// Immutable description of R_q = Z_q[X]/(X^d + 1) in RNS form; shareable
/// across threads after construction. Polynomials keep a pointer to their
/// context, so contexts must outlive them.
class RingContext {
 public:
  /// Strict constructor: every modulus must be prime, < 2^62, pairwise
  /// distinct, and == 1 (mod 2d) so the negacyclic NTT exists.
  static std::shared_ptr<const RingContext> make(std::uint32_t degree,
                                                 std::vector<u64> moduli);

  /// Research-ring constructor: moduli still prime and distinct, but limbs
  /// with q != 1 (mod 2d) are allowed and simply lack NTT support.
  static std::shared_ptr<const RingContext> make_relaxed(
      std::uint32_t degree, std::vector<u64> moduli);

  /// The `count` largest primes q in (2^(bits-1), 2^bits) with
  /// q == 1 (mod 2d), largest first.
  static std::vector<u64> find_ntt_moduli(std::uint32_t degree, unsigned bits,
                                          std::size_t count);

  /// Parse/emit the textual descriptor "d=<u32> moduli=<q0>,<q1>,...".
  static std::shared_ptr<const RingContext> from_descriptor(
      std::string_view text);
  std::string descriptor() const;

  std::uint32_t degree() const { return d_; }
  unsigned log2_degree() const { return log2_d_; }
  std::size_t limb_count() const { return limbs_.size(); }
  const LimbContext& limb(std::size_t i) const { return limbs_[i]; }
  const mpz_class& modulus_product() const { return q_big_; }
  double log2_modulus() const { return log2_q_; }
  bool ntt_ready() const { return ntt_ready_; }
  bool same_ring(const RingContext& o) const;

 private:
  RingContext() = default;
  static std::shared_ptr<const RingContext> build(std::uint32_t degree,
                                                  std::vector<u64> moduli,
                                                  bool strict);

  std::uint32_t d_ = 0;
  unsigned log2_d_ = 0;
  std::vector<LimbContext> limbs_;
  mpz_class q_big_;
  double log2_q_ = 0.0;
  bool ntt_ready_ = false;
};

using RingContextPtr = std::shared_ptr<const RingContext>;

/// Element of R_q stored limb-major: residue (i, j) of coefficient j modulo
/// q_i lives at data()[i * d + j]. Residues are always fully reduced.
class RnsPoly {
 public:
  RnsPoly() = default;
  RnsPoly(RingContextPtr ctx, Domain domain);

  const RingContext& ring() const { return *ctx_; }
  const RingContextPtr& ring_ptr() const { return ctx_; }
  bool empty() const { return ctx_ == nullptr; }
  Domain domain() const { return domain_; }
  void set_domain(Domain d) { domain_ = d; }

  std::span<u64> limb(std::size_t i) {
    return {vals_.data() + i * ring().degree(), ring().degree()};
  }
  std::span<const u64> limb(std::size_t i) const {
    return {vals_.data() + i * ring().degree(), ring().degree()};
  }
  std::span<const u64> values() const { return vals_; }
  std::span<u64> values() { return vals_; }

  bool operator==(const RnsPoly& o) const {
    return domain_ == o.domain_ && vals_ == o.vals_;
  }

 private:
  RingContextPtr ctx_;
  Domain domain_ = Domain::kCoeff;
  std::vector<u64> vals_;
};

// -- Transforms ------------------------------------------------------------

void ntt_forward_inplace(RnsPoly& p);
void ntt_inverse_inplace(RnsPoly& p);
RnsPoly ntt_forward(const RnsPoly& p);
RnsPoly ntt_inverse(const RnsPoly& p);

// Single-limb transforms over a raw coefficient array (used by sparse-key
// inversion and the lattice tooling).
void ntt_forward_limb(const LimbContext& lc, std::uint32_t d, std::span<u64> a);
void ntt_inverse_limb(const LimbContext& lc, std::uint32_t d, std::span<u64> a);

// -- Ring arithmetic -------------------------------------------------------

RnsPoly poly_add(const RnsPoly& a, const RnsPoly& b);
RnsPoly poly_sub(const RnsPoly& a, const RnsPoly& b);
RnsPoly poly_neg(const RnsPoly& a);
void poly_add_inplace(RnsPoly& a, const RnsPoly& b);

/// Product in R_q. Coefficient-domain operands round-trip through the NTT;
/// evaluation-domain operands multiply pointwise. Domains must match.
RnsPoly poly_mul(const RnsPoly& a, const RnsPoly& b, OpCounter* ops = nullptr);

RnsPoly pointwise_mul(const RnsPoly& a_ntt, const RnsPoly& b_ntt,
                      OpCounter* ops = nullptr);

RnsPoly make_constant(const RingContextPtr& ctx, u64 value, Domain domain);
RnsPoly make_monomial(const RingContextPtr& ctx, std::uint32_t degree_index,
                      u64 value);

// -- Inversion ---------------------------------------------------------------

/// Multiplicative inverse of limb i, or nullopt when the limb is a zero
/// divisor. NTT limbs test invertibility as "every evaluation nonzero" and
/// invert pointwise; non-NTT limbs run the extended Euclidean algorithm in
/// F_q[X]/(X^d+1). Output is in the same domain as the input.
std::optional<std::vector<u64>> invert_in_limb(const RnsPoly& p,
                                               std::size_t limb_index);

/// Whole-element inverse; nullopt if any limb fails.
std::optional<RnsPoly> try_invert(const RnsPoly& p);

/// Extended-Euclid inverse of a coefficient array modulo (X^d + 1) over
/// F_q; the non-NTT limb building block. nullopt when gcd != 1.
std::optional<std::vector<u64>> euclid_invert_limb(std::span<const u64> a,
                                                   u64 q, std::uint32_t d);

// -- Samplers ----------------------------------------------------------------

/// Uniform over R_q, sampled residue-wise per limb (exactly uniform by CRT).
RnsPoly sample_uniform(const RingContextPtr& ctx, Rng& rng,
                       Domain domain = Domain::kCoeff);

/// Coefficients i.i.d. uniform over {-1, 0, 1}, embedded per limb.
RnsPoly sample_ternary(const RingContextPtr& ctx, Rng& rng);

inline constexpr unsigned kErrorEta = 20;  // centered binomial, sigma^2 = 10

/// Error polynomial from the centered binomial distribution.
RnsPoly sample_error(const RingContextPtr& ctx, Rng& rng,
                     unsigned eta = kErrorEta);

/// Signed lift of coefficient j of limb i into (-q/2, q/2].
std::int64_t signed_residue(const RnsPoly& p, std::size_t limb_index,
                            std::size_t j);

}  // namespace otsdec
