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

#include "doctest.h"
#include "otsdec/bench.hpp"

using namespace otsdec;

namespace {

HeParams small_params() {
  auto ring = RingContext::make(
      1u << 10, RingContext::find_ntt_moduli(1u << 10, 30, 1));
  return make_he_params(ring);
}

}  // namespace

TEST_CASE("bench is deterministic in everything but wall time") {
  auto he = small_params();
  auto r1 = bench_decrypt(he, 128, 9, 3, 3, 20, 7, 2);
  auto r2 = bench_decrypt(he, 128, 9, 3, 3, 20, 7, 2);
  CHECK(r1.baseline_ops == r2.baseline_ops);
  CHECK(r1.local_ops == r2.local_ops);
  CHECK(r1.h == r2.h);
  // local side of the model: (h1+h2) d L + 2 d L
  const std::uint64_t d = he.ctx().degree();
  CHECK(r1.local_ops == (3 + 3) * d + 2 * d);
  // baseline follows a*d*log2(d) + d per limb with a = 1 + 1/log2(d)
  CHECK(r1.a_fit == doctest::Approx(1.0 + 1.0 / he.ctx().log2_degree()));
  CHECK(r1.to_csv_row().find(std::to_string(r1.iters)) != std::string::npos);
}

TEST_CASE("space report matches its analytic model and halves the baseline") {
  auto he = small_params();
  auto rep = space_report(he, 6, 3, 99);
  CHECK(rep.ratio > 0.45);
  CHECK(rep.ratio < 0.55);
  CHECK(rep.baseline_key_bytes > 0);
  CHECK(rep.ours_factors_bytes < rep.baseline_key_bytes / 16);
  // factored key: h1+h2 entries of (index + residues) plus two headers
  const std::size_t header = 4 + 1 + 8 * rep.limbs + 1 + 1 + 4;
  CHECK(rep.ours_factors_bytes ==
        2 * header + (6 + 3) * (4 + 8 * rep.limbs));
  CHECK(SpaceReport::csv_header() == std::string("d,ell,component,bits"));
  CHECK(rep.to_csv_rows().find("baseline_tables") != std::string::npos);
}

TEST_CASE("round trip holds across 10^4 trials at d=2^10") {
  auto he = small_params();
  Rng rng(1010);
  auto kp = keygen(he, rng);
  auto pair = make_composite_blinding_key(he.ring, 6, 3, 2, rng);
  auto bkey = blind_secret_key(kp.sk, pair);
  int failures = 0;
  Plaintext base, local;
  for (int i = 0; i < 10000; ++i) {
    Plaintext m = random_plaintext(he, rng);
    Ciphertext ct = encrypt(he, kp.pk, m, rng);
    decrypt_into(he, kp.sk, ct, base);
    local_decrypt_into(he, pair, blind_decrypt(bkey, ct), local);
    if (!(base == m) || !(local == m)) ++failures;
  }
  CHECK(failures == 0);
}
