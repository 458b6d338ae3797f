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

#include <algorithm>
#include <cmath>
#include <map>

#include "doctest.h"
#include "oracles.hpp"
#include "otsdec/protocol.hpp"

using namespace otsdec;

namespace {

RingContextPtr ntt_ring(std::uint32_t d, std::size_t L = 1,
                        unsigned bits = 20) {
  return RingContext::make(d, RingContext::find_ntt_moduli(d, bits, L));
}

/// Dense COEFF form of the blinding key inverse.
RnsPoly dense_inverse(const BlindingKeyPair& pair) {
  return pair.t_inv.domain() == Domain::kNtt ? ntt_inverse(pair.t_inv)
                                             : pair.t_inv;
}

void check_product_is_one(const RnsPoly& t_dense, const RnsPoly& inv_dense) {
  const auto& ring = t_dense.ring();
  for (std::size_t i = 0; i < ring.limb_count(); ++i) {
    auto prod = oracle::schoolbook_negacyclic(t_dense.limb(i),
                                              inv_dense.limb(i),
                                              ring.limb(i).q);
    CHECK(prod[0] == 1);
    for (std::uint32_t j = 1; j < ring.degree(); ++j) CHECK(prod[j] == 0);
  }
}

}  // namespace

TEST_CASE("monomial blinding factor: t = c*x^k inverts to c^{-1} * -x^{d-k}") {
  auto ring = ntt_ring(16);
  Rng rng(12);
  auto f = make_blinding_factor(ring, 1, rng);
  REQUIRE(f.factor.weight == 1);
  check_product_is_one(densify(f.factor), ntt_inverse(f.inverse));
}

TEST_CASE("factor times inverse is one (schoolbook, d=8, L=2)") {
  auto ring = ntt_ring(8, 2);
  Rng rng(34);
  for (int t = 0; t < 40; ++t) {
    auto pair = make_blinding_key(ring, 3, rng);
    check_product_is_one(densify(pair.factors[0]), dense_inverse(pair));
  }
}

TEST_CASE("blinding factor on a non-NTT research ring (d=16, q=17)") {
  auto ring = RingContext::make_relaxed(16, {17});
  Rng rng(56);
  for (int t = 0; t < 40; ++t) {
    auto pair = make_blinding_key(ring, 3, rng);
    CHECK(pair.t_inv.domain() == Domain::kCoeff);
    check_product_is_one(densify(pair.factors[0]), pair.t_inv);
  }
}

TEST_CASE("support positions are uniform (d=16, h=3)") {
  auto ring = ntt_ring(16, 1, 20);
  Rng rng(990);
  const int n = 20000;
  std::map<std::vector<std::uint32_t>, int> counts;
  for (int t = 0; t < n; ++t) {
    auto f = make_blinding_factor(ring, 3, rng);
    counts[f.factor.indices]++;
  }
  auto supports = oracle::enumerate_supports(16, 3);
  CHECK(supports.size() == 560);
  const double mean = static_cast<double>(n) / supports.size();
  const double sigma = std::sqrt(mean * (1.0 - 1.0 / supports.size()));
  for (const auto& s : supports) {
    auto it = counts.find(s);
    double c = it == counts.end() ? 0.0 : it->second;
    CHECK(std::abs(c - mean) < 5.0 * sigma);
  }
  // and nothing outside the enumerated support set ever appears
  CHECK(counts.size() <= supports.size());
}

TEST_CASE("factor values are close to uniform over [1, q)") {
  // weight-2 factors over a small field; conditioning on invertibility may
  // only nudge the value distribution, so generous 5-sigma buckets
  auto ring = RingContext::make(8, {17});
  Rng rng(314);
  std::array<long, 16> counts{};
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    auto f = make_blinding_factor(ring, 2, rng);
    for (std::uint32_t j = 0; j < 2; ++j) counts[f.factor.value(j, 0) - 1]++;
  }
  const double mean = 2.0 * n / 16.0;
  const double sigma = std::sqrt(2.0 * n * (1.0 / 16.0) * (15.0 / 16.0));
  for (long c : counts)
    CHECK(std::abs(static_cast<double>(c) - mean) < 5.0 * sigma);
}

TEST_CASE("composite key properties") {
  auto ring = ntt_ring(64, 2, 24);
  Rng rng(777);

  SUBCASE("dense weight bound h1*h2 - min") {
    auto pair = make_composite_blinding_key(ring, 6, 3, 2, rng);
    RnsPoly prod = sparse_dense_mul(pair.factors[1], densify(pair.factors[0]));
    CHECK(dense_weight(prod) >= 15);
  }

  SUBCASE("weight-1 factors multiply to a monomial") {
    auto pair = make_composite_blinding_key(ring, 1, 1, 2, rng);
    RnsPoly prod = sparse_dense_mul(pair.factors[1], densify(pair.factors[0]));
    CHECK(dense_weight(prod) == 1);
  }

  SUBCASE("product times inverse is one (schoolbook, d=16)") {
    auto small = ntt_ring(16, 2);
    for (int t = 0; t < 10; ++t) {
      auto pair = make_composite_blinding_key(small, 3, 2, 2, rng);
      RnsPoly prod =
          sparse_dense_mul(pair.factors[1], densify(pair.factors[0]));
      check_product_is_one(prod, dense_inverse(pair));
    }
  }

  SUBCASE("second factor values live in [1, q2)") {
    auto pair = make_composite_blinding_key(ring, 6, 3, 2, rng);
    const auto& b = pair.factors[1];
    for (std::uint32_t j = 0; j < b.weight; ++j)
      for (std::size_t i = 0; i < ring->limb_count(); ++i)
        CHECK(b.value(j, i) == 1);
  }

  SUBCASE("q2 must stay below every limb modulus") {
    CHECK_THROWS_AS(
        make_composite_blinding_key(ring, 2, 2, u64{1} << 40, rng),
        ContractError);
  }
}

TEST_CASE("secret key blinding") {
  auto ring = ntt_ring(16, 2);
  auto he = make_he_params(ring, 5);
  Rng rng(4);
  auto kp = keygen(he, rng);

  SUBCASE("identity pair keeps s") {
    auto pair = make_identity_blinding_key(ring);
    auto blinded = blind_secret_key(kp.sk, pair);
    CHECK(blinded.s_ntt == kp.sk.s_ntt);
  }

  SUBCASE("zero secret blinds to zero") {
    SecretKey zero;
    zero.s = RnsPoly(ring, Domain::kCoeff);
    refresh_secret_key_cache(he, zero);
    auto pair = make_blinding_key(ring, 3, rng);
    auto blinded = blind_secret_key(zero, pair);
    for (std::size_t i = 0; i < ring->limb_count(); ++i)
      for (u64 v : blinded.s_ntt.limb(i)) CHECK(v == 0);
  }

  SUBCASE("unblinding recovers s: s~ * prod(factors) = s") {
    auto pair = make_composite_blinding_key(ring, 3, 2, 2, rng);
    auto blinded = blind_secret_key(kp.sk, pair);
    RnsPoly w = ntt_inverse(blinded.s_ntt);
    for (const auto& f : pair.factors) w = sparse_dense_mul(f, w);
    CHECK(w == kp.sk.s);
  }
}

TEST_CASE("blind decryption") {
  auto ring = ntt_ring(1u << 12, 2, 60);
  auto he = make_he_params(ring);
  Rng rng(500);
  auto kp = keygen(he, rng);
  Plaintext m = random_plaintext(he, rng);
  Ciphertext ct = encrypt(he, kp.pk, m, rng);

  SUBCASE("zero blinded key maps u to zero") {
    SecretKey zero;
    zero.s = RnsPoly(ring, Domain::kCoeff);
    refresh_secret_key_cache(he, zero);
    auto pair = make_identity_blinding_key(ring);
    auto bsk = blind_secret_key(zero, pair);
    auto bct = blind_decrypt(bsk, ct);
    for (std::size_t i = 0; i < ring->limb_count(); ++i)
      for (u64 v : bct.u.limb(i)) CHECK(v == 0);
    CHECK(bct.v == ct.v);
  }

  SUBCASE("identity blinding reproduces the baseline inner product") {
    auto pair = make_identity_blinding_key(ring);
    auto bsk = blind_secret_key(kp.sk, pair);
    auto bct = blind_decrypt(bsk, ct);
    RnsPoly w = local_decrypt_accumulator(pair, bct);
    RnsPoly expect = poly_add(poly_mul(ct.u, kp.sk.s), ct.v);
    CHECK(w == expect);
  }

  SUBCASE("local decryption equals baseline decryption end to end") {
    auto pair = make_composite_blinding_key(ring, 6, 3, 2, rng);
    auto bsk = blind_secret_key(kp.sk, pair);
    for (int t = 0; t < 10; ++t) {
      Plaintext mt = random_plaintext(he, rng);
      Ciphertext c = encrypt(he, kp.pk, mt, rng);
      Plaintext base = decrypt(he, kp.sk, c);
      Plaintext local = local_decrypt(he, pair, blind_decrypt(bsk, c));
      CHECK(base == mt);
      CHECK(local == mt);
    }
  }

  SUBCASE("unblinding factor order does not matter") {
    auto pair = make_composite_blinding_key(ring, 6, 3, 2, rng);
    auto bsk = blind_secret_key(kp.sk, pair);
    auto bct = blind_decrypt(bsk, ct);
    BlindingKeyPair swapped = pair;
    std::swap(swapped.factors[0], swapped.factors[1]);
    CHECK(local_decrypt(he, pair, bct) == local_decrypt(he, swapped, bct));
  }
}

TEST_CASE("big-integer cross-check of the full chain at d=16") {
  auto ring = ntt_ring(16, 2);
  auto he = make_he_params(ring, 5);
  Rng rng(123);
  auto kp = keygen(he, rng);
  auto pair = make_composite_blinding_key(ring, 3, 2, 2, rng);
  auto bsk = blind_secret_key(kp.sk, pair);
  Plaintext m = random_plaintext(he, rng);
  Ciphertext ct = encrypt(he, kp.pk, m, rng);
  auto bct = blind_decrypt(bsk, ct);

  // u*s + v straight from the schoolbook oracle, limb by limb
  RnsPoly w = local_decrypt_accumulator(pair, bct);
  for (std::size_t i = 0; i < ring->limb_count(); ++i) {
    auto us = oracle::schoolbook_negacyclic(ct.u.limb(i), kp.sk.s.limb(i),
                                            ring->limb(i).q);
    for (std::uint32_t j = 0; j < 16; ++j) {
      u64 expect = oracle::oadd(us[j], ct.v.limb(i)[j], ring->limb(i).q);
      CHECK(w.limb(i)[j] == expect);
    }
  }
}

TEST_CASE("sparse_dense_mul") {
  auto ring = ntt_ring(32, 2, 24);
  Rng rng(31);

  SUBCASE("multiplying by one is the identity") {
    auto pair = make_identity_blinding_key(ring);
    RnsPoly u = sample_uniform(ring, rng);
    CHECK(sparse_dense_mul(pair.factors[0], u) == u);
  }

  SUBCASE("x^(d/2) rotates all-ones with a sign flip") {
    SparsePoly rot;
    rot.ring = ring;
    rot.weight = 1;
    rot.indices = {16};
    rot.values.assign(ring->limb_count(), 1);
    RnsPoly ones = make_constant(ring, 1, Domain::kCoeff);
    for (std::size_t i = 0; i < ring->limb_count(); ++i)
      std::fill(ones.limb(i).begin(), ones.limb(i).end(), 1);
    RnsPoly out = sparse_dense_mul(rot, ones);
    for (std::size_t i = 0; i < ring->limb_count(); ++i) {
      const u64 q = ring->limb(i).q;
      for (std::uint32_t j = 0; j < 16; ++j) CHECK(out.limb(i)[j] == q - 1);
      for (std::uint32_t j = 16; j < 32; ++j) CHECK(out.limb(i)[j] == 1);
    }
  }

  SUBCASE("random sparse times dense equals the NTT product on every limb") {
    for (int t = 0; t < 20; ++t) {
      auto f = make_blinding_factor(ring, 5, rng);
      RnsPoly u = sample_uniform(ring, rng);
      RnsPoly got = sparse_dense_mul(f.factor, u);
      RnsPoly expect = poly_mul(densify(f.factor), u);
      CHECK(got == expect);
    }
  }

  SUBCASE("all reduction paths agree") {
    auto f = make_blinding_factor(ring, 7, rng);
    RnsPoly u = sample_uniform(ring, rng);
    RnsPoly a = sparse_dense_mul(f.factor, u, ReductionPath::kAccumulate128);
    RnsPoly b = sparse_dense_mul(f.factor, u, ReductionPath::kAccumulate64);
    RnsPoly c = sparse_dense_mul(f.factor, u, ReductionPath::kEager);
    CHECK(a == b);
    CHECK(a == c);
  }

  SUBCASE("128-bit path at its headroom boundary (62-bit q, h=8)") {
    auto big = ntt_ring(32, 1, 62);
    auto f = make_blinding_factor(big, 8, rng);  // ceil_log2(8)+2*62 = 127
    RnsPoly u = sample_uniform(big, rng);
    RnsPoly got = sparse_dense_mul(f.factor, u, ReductionPath::kAccumulate128);
    CHECK(got == sparse_dense_mul(f.factor, u, ReductionPath::kEager));
  }

  SUBCASE("64-bit path at its headroom boundary (58-bit q, h=32)") {
    auto big = ntt_ring(64, 1, 58);
    auto f = make_blinding_factor(big, 32, rng);  // ceil_log2(32)+58 = 63
    RnsPoly u = sample_uniform(big, rng);
    RnsPoly got = sparse_dense_mul(f.factor, u, ReductionPath::kAccumulate64);
    CHECK(got == sparse_dense_mul(f.factor, u, ReductionPath::kEager));
  }

  SUBCASE("headroom violations are rejected") {
    auto big = ntt_ring(64, 1, 62);
    auto f = make_blinding_factor(big, 40, rng);
    RnsPoly u = sample_uniform(big, rng);
    CHECK_THROWS_AS(
        sparse_dense_mul(f.factor, u, ReductionPath::kAccumulate128),
        ContractError);
    CHECK_THROWS_AS(
        sparse_dense_mul(f.factor, u, ReductionPath::kAccumulate64),
        ContractError);
    // automatic selection falls back to eager and stays exact
    RnsPoly got = sparse_dense_mul(f.factor, u);
    CHECK(got == poly_mul(densify(f.factor), u));
  }
}

TEST_CASE("local decryption scalar-op accounting is exact") {
  auto ring = ntt_ring(1u << 10, 3, 40);
  auto he = make_he_params(ring);
  Rng rng(64);
  auto kp = keygen(he, rng);
  auto pair = make_composite_blinding_key(ring, 6, 3, 2, rng);
  auto bsk = blind_secret_key(kp.sk, pair);
  Plaintext m = random_plaintext(he, rng);
  auto bct = blind_decrypt(bsk, encrypt(he, kp.pk, m, rng));
  OpCounter ops;
  (void)local_decrypt(he, pair, bct, &ops);
  const std::uint64_t d = ring->degree();
  const std::uint64_t L = ring->limb_count();
  CHECK(ops.scalar_mults == (6 + 3) * d * L + 2 * d * L);
}

TEST_CASE("setup picks parameters matching the published table") {
  SUBCASE("d=2^13, log q=23, lambda=128 -> h=17") {
    auto p = setup_for(1u << 13, 23.0, 128);
    CHECK(p.h == 17);
    CHECK(p.h1 == 6);
    CHECK(p.q2 == 2);
  }
  SUBCASE("d=2^15, log q=22, lambda=128 -> h=13") {
    CHECK(setup_for(1u << 15, 22.0, 128).h == 13);
  }
  SUBCASE("d=2^16, log q=13, lambda=256 -> h=26") {
    CHECK(setup_for(1u << 16, 13.0, 256).h == 26);
  }
  SUBCASE("unsupported lambda is rejected") {
    CHECK_THROWS_AS(setup_for(1u << 13, 23.0, 100), ContractError);
  }
}
