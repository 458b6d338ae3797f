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

#include "otsdec/ring.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <sstream>

namespace otsdec {

namespace {

u64 mul_mod_u128(u64 a, u64 b, u64 q) { return mul_mod(a, b, q); }

std::uint32_t bit_reverse32(std::uint32_t x, unsigned bits) {
  std::uint32_t r = 0;
  for (unsigned i = 0; i < bits; ++i) {
    r = (r << 1) | (x & 1);
    x >>= 1;
  }
  return r;
}

}  // namespace

bool is_prime_u64(u64 n) {
  if (n < 2) return false;
  for (u64 p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull,
                29ull, 31ull, 37ull}) {
    if (n == p) return true;
    if (n % p == 0) return false;
  }
  u64 d = n - 1;
  unsigned s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  // This witness set is deterministic for all n < 3.3e24.
  for (u64 a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull,
                29ull, 31ull, 37ull}) {
    u64 x = pow_mod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (unsigned i = 1; i < s; ++i) {
      x = mul_mod_u128(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

u64 find_generator(u64 q) {
  u64 order = q - 1;
  std::vector<u64> factors;
  u64 n = order;
  for (u64 f = 2; f * f <= n; f += (f == 2 ? 1 : 2)) {
    if (n % f == 0) {
      factors.push_back(f);
      while (n % f == 0) n /= f;
    }
  }
  if (n > 1) factors.push_back(n);
  for (u64 g = 2; g < q; ++g) {
    bool ok = true;
    for (u64 f : factors) {
      if (pow_mod(g, order / f, q) == 1) {
        ok = false;
        break;
      }
    }
    if (ok) return g;
  }
  throw ContractError("no generator found (modulus not prime?)");
}

// ---------------------------------------------------------------------------
// RingContext
// ---------------------------------------------------------------------------

std::shared_ptr<const RingContext> RingContext::build(std::uint32_t degree,
                                                      std::vector<u64> moduli,
                                                      bool strict) {
  require(degree >= 2 && std::has_single_bit(degree),
          "ring degree must be a power of two >= 2");
  require(!moduli.empty(), "at least one modulus required");
  auto ctx = std::shared_ptr<RingContext>(new RingContext());
  ctx->d_ = degree;
  ctx->log2_d_ = static_cast<unsigned>(std::countr_zero(degree));
  ctx->q_big_ = 1;
  ctx->log2_q_ = 0.0;
  ctx->ntt_ready_ = true;

  const u64 two_d = 2ull * degree;
  for (std::size_t i = 0; i < moduli.size(); ++i) {
    u64 q = moduli[i];
    require(q >= 2 && q < (u64{1} << 62), "modulus out of range [2, 2^62)");
    require(is_prime_u64(q), "modulus must be prime");
    for (std::size_t j = 0; j < i; ++j)
      require(moduli[j] != q, "moduli must be distinct");

    LimbContext lc;
    lc.q = q;
    lc.barrett64 = static_cast<u64>((u128{1} << 64) / q);
    lc.r64 = static_cast<u64>((u128{1} << 64) % q);
    lc.r64_shoup = shoup_precompute(lc.r64, q);
    lc.ntt = ((q - 1) % two_d == 0);
    if (strict)
      require(lc.ntt, "modulus must satisfy q == 1 (mod 2d)");
    if (lc.ntt) {
      u64 g = find_generator(q);
      u64 psi = pow_mod(g, (q - 1) / two_d, q);
      u64 psi_inv = inv_mod_prime(psi, q);
      lc.roots.resize(degree);
      lc.roots_shoup.resize(degree);
      lc.inv_roots.resize(degree);
      lc.inv_roots_shoup.resize(degree);
      for (std::uint32_t k = 0; k < degree; ++k) {
        std::uint32_t rev = bit_reverse32(k, ctx->log2_d_);
        lc.roots[k] = pow_mod(psi, rev, q);
        lc.roots_shoup[k] = shoup_precompute(lc.roots[k], q);
        lc.inv_roots[k] = pow_mod(psi_inv, rev, q);
        lc.inv_roots_shoup[k] = shoup_precompute(lc.inv_roots[k], q);
      }
      lc.n_inv = inv_mod_prime(degree % q, q);
      lc.n_inv_shoup = shoup_precompute(lc.n_inv, q);
    } else {
      ctx->ntt_ready_ = false;
    }
    ctx->q_big_ *= static_cast<unsigned long>(q);
    ctx->log2_q_ += std::log2(static_cast<double>(q));
    ctx->limbs_.push_back(std::move(lc));
  }
  return ctx;
}

std::shared_ptr<const RingContext> RingContext::make(std::uint32_t degree,
                                                     std::vector<u64> moduli) {
  return build(degree, std::move(moduli), /*strict=*/true);
}

std::shared_ptr<const RingContext> RingContext::make_relaxed(
    std::uint32_t degree, std::vector<u64> moduli) {
  return build(degree, std::move(moduli), /*strict=*/false);
}

std::vector<u64> RingContext::find_ntt_moduli(std::uint32_t degree,
                                              unsigned bits,
                                              std::size_t count) {
  require(bits >= 3 && bits <= 62, "modulus width must be in [3, 62]");
  require(degree >= 2 && std::has_single_bit(degree), "degree power of two");
  const u64 two_d = 2ull * degree;
  u64 hi = (bits == 64) ? ~u64{0} : (u64{1} << bits);
  u64 lo = u64{1} << (bits - 1);
  std::vector<u64> out;
  u64 k = (hi - 2) / two_d;
  while (out.size() < count && k > 0) {
    u64 q = k * two_d + 1;
    if (q <= lo) break;
    if (q < hi && is_prime_u64(q)) out.push_back(q);
    --k;
  }
  if (out.size() < count)
    throw InfeasibleParamsError("not enough NTT-friendly primes of that width");
  return out;
}

bool RingContext::same_ring(const RingContext& o) const {
  if (this == &o) return true;
  if (d_ != o.d_ || limbs_.size() != o.limbs_.size()) return false;
  for (std::size_t i = 0; i < limbs_.size(); ++i)
    if (limbs_[i].q != o.limbs_[i].q) return false;
  return true;
}

std::string RingContext::descriptor() const {
  std::ostringstream os;
  os << "d=" << d_ << " moduli=";
  for (std::size_t i = 0; i < limbs_.size(); ++i) {
    if (i) os << ',';
    os << limbs_[i].q;
  }
  return os.str();
}

std::shared_ptr<const RingContext> RingContext::from_descriptor(
    std::string_view text) {
  auto fail = [] { throw ContractError("malformed ring descriptor"); };
  auto dpos = text.find("d=");
  auto mpos = text.find("moduli=");
  if (dpos == std::string_view::npos || mpos == std::string_view::npos) fail();
  std::uint32_t d = 0;
  {
    auto sub = text.substr(dpos + 2);
    auto end = sub.find(' ');
    auto tok = sub.substr(0, end);
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), d);
    if (ec != std::errc{} || p != tok.data() + tok.size()) fail();
  }
  std::vector<u64> moduli;
  {
    auto sub = text.substr(mpos + 7);
    auto end = sub.find(' ');
    sub = sub.substr(0, end);
    std::size_t start = 0;
    while (start <= sub.size()) {
      auto comma = sub.find(',', start);
      auto tok = sub.substr(start, comma == std::string_view::npos
                                       ? std::string_view::npos
                                       : comma - start);
      if (tok.empty()) fail();
      u64 q = 0;
      auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), q);
      if (ec != std::errc{} || p != tok.data() + tok.size()) fail();
      moduli.push_back(q);
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
  }
  return make_relaxed(d, std::move(moduli));
}

// ---------------------------------------------------------------------------
// RnsPoly
// ---------------------------------------------------------------------------

RnsPoly::RnsPoly(RingContextPtr ctx, Domain domain)
    : ctx_(std::move(ctx)), domain_(domain) {
  vals_.assign(std::size_t{ctx_->degree()} * ctx_->limb_count(), 0);
}

// ---------------------------------------------------------------------------
// NTT (merged-twist negacyclic transform, lazy Harvey butterflies)
// ---------------------------------------------------------------------------

void ntt_forward_limb(const LimbContext& lc, std::uint32_t d,
                      std::span<u64> a) {
  require(lc.ntt, "limb has no NTT support (q != 1 mod 2d)");
  const u64 q = lc.q;
  const u64 two_q = 2 * q;
  std::uint32_t t = d;
  for (std::uint32_t m = 1; m < d; m <<= 1) {
    t >>= 1;
    for (std::uint32_t i = 0; i < m; ++i) {
      const u64 w = lc.roots[m + i];
      const u64 ws = lc.roots_shoup[m + i];
      u64* x = a.data() + 2 * i * t;
      u64* y = x + t;
      for (std::uint32_t j = 0; j < t; ++j) {
        u64 u = x[j];
        if (u >= two_q) u -= two_q;           // keep operands < 2q
        u64 v = shoup_mul_lazy(y[j], w, ws, q);  // < 2q
        x[j] = u + v;                          // < 4q
        y[j] = u - v + two_q;                  // < 4q
      }
    }
  }
  for (std::uint32_t j = 0; j < d; ++j) {
    u64 v = a[j];
    if (v >= two_q) v -= two_q;
    if (v >= q) v -= q;
    a[j] = v;
  }
}

void ntt_inverse_limb(const LimbContext& lc, std::uint32_t d,
                      std::span<u64> a) {
  require(lc.ntt, "limb has no NTT support (q != 1 mod 2d)");
  const u64 q = lc.q;
  const u64 two_q = 2 * q;
  std::uint32_t t = 1;
  for (std::uint32_t m = d; m > 1; m >>= 1) {
    std::uint32_t h = m >> 1;
    std::uint32_t j1 = 0;
    for (std::uint32_t i = 0; i < h; ++i) {
      const u64 w = lc.inv_roots[h + i];
      const u64 ws = lc.inv_roots_shoup[h + i];
      u64* x = a.data() + j1;
      u64* y = x + t;
      for (std::uint32_t j = 0; j < t; ++j) {
        u64 u = x[j];  // < 2q
        u64 v = y[j];  // < 2q
        u64 s = u + v;
        if (s >= two_q) s -= two_q;
        x[j] = s;
        y[j] = shoup_mul_lazy(u - v + two_q, w, ws, q);  // < 2q
      }
      j1 += 2 * t;
    }
    t <<= 1;
  }
  for (std::uint32_t j = 0; j < d; ++j)
    a[j] = shoup_mul(a[j], lc.n_inv, lc.n_inv_shoup, q);
}

void ntt_forward_inplace(RnsPoly& p) {
  require(!p.empty(), "empty polynomial");
  require(p.domain() == Domain::kCoeff, "ntt_forward requires COEFF domain");
  const auto& ring = p.ring();
  for (std::size_t i = 0; i < ring.limb_count(); ++i)
    ntt_forward_limb(ring.limb(i), ring.degree(), p.limb(i));
  p.set_domain(Domain::kNtt);
}

void ntt_inverse_inplace(RnsPoly& p) {
  require(!p.empty(), "empty polynomial");
  require(p.domain() == Domain::kNtt, "ntt_inverse requires NTT domain");
  const auto& ring = p.ring();
  for (std::size_t i = 0; i < ring.limb_count(); ++i)
    ntt_inverse_limb(ring.limb(i), ring.degree(), p.limb(i));
  p.set_domain(Domain::kCoeff);
}

RnsPoly ntt_forward(const RnsPoly& p) {
  RnsPoly r = p;
  ntt_forward_inplace(r);
  return r;
}

RnsPoly ntt_inverse(const RnsPoly& p) {
  RnsPoly r = p;
  ntt_inverse_inplace(r);
  return r;
}

// ---------------------------------------------------------------------------
// Arithmetic
// ---------------------------------------------------------------------------

namespace {
void check_compatible(const RnsPoly& a, const RnsPoly& b) {
  require(!a.empty() && !b.empty(), "empty polynomial");
  require(a.ring().same_ring(b.ring()), "ring context mismatch");
  require(a.domain() == b.domain(), "domain mismatch");
}
}  // namespace

RnsPoly poly_add(const RnsPoly& a, const RnsPoly& b) {
  RnsPoly r = a;
  poly_add_inplace(r, b);
  return r;
}

void poly_add_inplace(RnsPoly& a, const RnsPoly& b) {
  check_compatible(a, b);
  const auto& ring = a.ring();
  for (std::size_t i = 0; i < ring.limb_count(); ++i) {
    const u64 q = ring.limb(i).q;
    auto x = a.limb(i);
    auto y = b.limb(i);
    for (std::uint32_t j = 0; j < ring.degree(); ++j)
      x[j] = add_mod(x[j], y[j], q);
  }
}

RnsPoly poly_sub(const RnsPoly& a, const RnsPoly& b) {
  check_compatible(a, b);
  RnsPoly r = a;
  const auto& ring = a.ring();
  for (std::size_t i = 0; i < ring.limb_count(); ++i) {
    const u64 q = ring.limb(i).q;
    auto x = r.limb(i);
    auto y = b.limb(i);
    for (std::uint32_t j = 0; j < ring.degree(); ++j)
      x[j] = sub_mod(x[j], y[j], q);
  }
  return r;
}

RnsPoly poly_neg(const RnsPoly& a) {
  require(!a.empty(), "empty polynomial");
  RnsPoly r = a;
  const auto& ring = a.ring();
  for (std::size_t i = 0; i < ring.limb_count(); ++i) {
    const u64 q = ring.limb(i).q;
    for (u64& v : r.limb(i)) v = neg_mod(v, q);
  }
  return r;
}

RnsPoly pointwise_mul(const RnsPoly& a, const RnsPoly& b, OpCounter* ops) {
  check_compatible(a, b);
  require(a.domain() == Domain::kNtt, "pointwise_mul requires NTT domain");
  RnsPoly r = a;
  const auto& ring = a.ring();
  for (std::size_t i = 0; i < ring.limb_count(); ++i) {
    const u64 q = ring.limb(i).q;
    auto x = r.limb(i);
    auto y = b.limb(i);
    for (std::uint32_t j = 0; j < ring.degree(); ++j)
      x[j] = mul_mod(x[j], y[j], q);
  }
  if (ops) ops->add(std::uint64_t{ring.degree()} * ring.limb_count());
  return r;
}

RnsPoly poly_mul(const RnsPoly& a, const RnsPoly& b, OpCounter* ops) {
  check_compatible(a, b);
  if (a.domain() == Domain::kNtt) return pointwise_mul(a, b, ops);
  RnsPoly fa = ntt_forward(a);
  RnsPoly fb = ntt_forward(b);
  const auto& ring = a.ring();
  if (ops) {
    // two forward transforms, the pointwise pass, one inverse + scale
    std::uint64_t per_limb =
        std::uint64_t{ring.degree()} * ring.log2_degree() * 3 / 2 +
        2 * ring.degree();
    ops->add(per_limb * ring.limb_count());
  }
  RnsPoly prod = pointwise_mul(fa, fb, nullptr);
  ntt_inverse_inplace(prod);
  return prod;
}

RnsPoly make_constant(const RingContextPtr& ctx, u64 value, Domain domain) {
  RnsPoly p(ctx, domain);
  for (std::size_t i = 0; i < ctx->limb_count(); ++i) {
    u64 v = value % ctx->limb(i).q;
    auto lb = p.limb(i);
    if (domain == Domain::kNtt) {
      std::fill(lb.begin(), lb.end(), v);  // constants evaluate to themselves
    } else {
      lb[0] = v;
    }
  }
  return p;
}

RnsPoly make_monomial(const RingContextPtr& ctx, std::uint32_t degree_index,
                      u64 value) {
  require(degree_index < ctx->degree(), "monomial degree out of range");
  RnsPoly p(ctx, Domain::kCoeff);
  for (std::size_t i = 0; i < ctx->limb_count(); ++i)
    p.limb(i)[degree_index] = value % ctx->limb(i).q;
  return p;
}

// ---------------------------------------------------------------------------
// Inversion
// ---------------------------------------------------------------------------

namespace {

/// Batch inversion of evaluations (all nonzero) with one exponentiation.
void batch_invert(std::span<u64> v, u64 q) {
  std::vector<u64> prefix(v.size());
  u64 acc = 1;
  for (std::size_t j = 0; j < v.size(); ++j) {
    prefix[j] = acc;
    acc = mul_mod(acc, v[j], q);
  }
  u64 inv = inv_mod_prime(acc, q);
  for (std::size_t j = v.size(); j-- > 0;) {
    u64 orig = v[j];
    v[j] = mul_mod(inv, prefix[j], q);
    inv = mul_mod(inv, orig, q);
  }
}

/// Extended Euclid in F_q[X]: inverse of a (degree < d) modulo X^d + 1.
std::optional<std::vector<u64>> euclid_invert(std::span<const u64> a_in, u64 q,
                                              std::uint32_t d) {
  using Poly = std::vector<u64>;
  auto deg = [](const Poly& p) -> int {
    for (int i = static_cast<int>(p.size()) - 1; i >= 0; --i)
      if (p[i]) return i;
    return -1;
  };
  Poly r0(d + 1, 0);  // X^d + 1
  r0[0] = 1;
  r0[d] = 1;
  Poly r1(a_in.begin(), a_in.end());
  r1.resize(d + 1, 0);
  Poly s0(d + 1, 0), s1(d + 1, 0);
  s1[0] = 1;  // track coefficients on a only
  while (deg(r1) >= 0) {
    int dr0 = deg(r0), dr1 = deg(r1);
    if (dr0 < dr1) {
      std::swap(r0, r1);
      std::swap(s0, s1);
      continue;
    }
    u64 factor = mul_mod(r0[dr0], inv_mod_prime(r1[dr1], q), q);
    int shift = dr0 - dr1;
    for (int i = 0; i <= dr1; ++i)
      r0[i + shift] = sub_mod(r0[i + shift], mul_mod(factor, r1[i], q), q);
    for (int i = 0; i + shift <= static_cast<int>(d); ++i)
      s0[i + shift] = sub_mod(s0[i + shift], mul_mod(factor, s1[i], q), q);
    if (deg(r0) < deg(r1)) {
      std::swap(r0, r1);
      std::swap(s0, s1);
    }
  }
  // gcd is in r0 now; invertible iff it is a nonzero constant.
  int g = deg(r0);
  if (g != 0) return std::nullopt;
  u64 c_inv = inv_mod_prime(r0[0], q);
  std::vector<u64> out(d, 0);
  for (std::uint32_t i = 0; i < d; ++i) out[i] = mul_mod(s0[i], c_inv, q);
  return out;
}

}  // namespace

std::optional<std::vector<u64>> euclid_invert_limb(std::span<const u64> a,
                                                   u64 q, std::uint32_t d) {
  return euclid_invert(a, q, d);
}

std::optional<std::vector<u64>> invert_in_limb(const RnsPoly& p,
                                               std::size_t limb_index) {
  require(!p.empty(), "empty polynomial");
  const auto& ring = p.ring();
  require(limb_index < ring.limb_count(), "limb index out of range");
  const auto& lc = ring.limb(limb_index);
  const std::uint32_t d = ring.degree();
  auto src = p.limb(limb_index);

  if (!lc.ntt) {
    require(p.domain() == Domain::kCoeff,
            "non-NTT limb holds coefficient data only");
    return euclid_invert(src, lc.q, d);
  }

  std::vector<u64> evals(src.begin(), src.end());
  if (p.domain() == Domain::kCoeff) ntt_forward_limb(lc, d, evals);
  for (u64 v : evals)
    if (v == 0) return std::nullopt;
  batch_invert(evals, lc.q);
  if (p.domain() == Domain::kCoeff) ntt_inverse_limb(lc, d, evals);
  return evals;
}

std::optional<RnsPoly> try_invert(const RnsPoly& p) {
  require(!p.empty(), "empty polynomial");
  RnsPoly out(p.ring_ptr(), p.domain());
  for (std::size_t i = 0; i < p.ring().limb_count(); ++i) {
    auto inv = invert_in_limb(p, i);
    if (!inv) return std::nullopt;
    std::copy(inv->begin(), inv->end(), out.limb(i).begin());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Samplers
// ---------------------------------------------------------------------------

RnsPoly sample_uniform(const RingContextPtr& ctx, Rng& rng, Domain domain) {
  RnsPoly p(ctx, domain);
  for (std::size_t i = 0; i < ctx->limb_count(); ++i) {
    const u64 q = ctx->limb(i).q;
    for (u64& v : p.limb(i)) v = rng.uniform_below(q);
  }
  return p;
}

RnsPoly sample_ternary(const RingContextPtr& ctx, Rng& rng) {
  RnsPoly p(ctx, Domain::kCoeff);
  const std::uint32_t d = ctx->degree();
  for (std::uint32_t j = 0; j < d; ++j) {
    u64 t = rng.uniform_below(3);  // 0, 1, 2 -> 0, 1, -1
    if (t == 0) continue;
    for (std::size_t i = 0; i < ctx->limb_count(); ++i)
      p.limb(i)[j] = (t == 1) ? 1 : ctx->limb(i).q - 1;
  }
  return p;
}

RnsPoly sample_error(const RingContextPtr& ctx, Rng& rng, unsigned eta) {
  RnsPoly p(ctx, Domain::kCoeff);
  const std::uint32_t d = ctx->degree();
  for (std::uint32_t j = 0; j < d; ++j) {
    int e = rng.centered_binomial(eta);
    if (e == 0) continue;
    for (std::size_t i = 0; i < ctx->limb_count(); ++i) {
      const u64 q = ctx->limb(i).q;
      p.limb(i)[j] = e > 0 ? static_cast<u64>(e) : q - static_cast<u64>(-e);
    }
  }
  return p;
}

std::int64_t signed_residue(const RnsPoly& p, std::size_t limb_index,
                            std::size_t j) {
  const u64 q = p.ring().limb(limb_index).q;
  u64 v = p.limb(limb_index)[j];
  return v > q / 2 ? static_cast<std::int64_t>(v) - static_cast<std::int64_t>(q)
                   : static_cast<std::int64_t>(v);
}

}  // namespace otsdec
