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

#include <benchmark/benchmark.h>

#include <map>
#include <memory>

#include "otsdec/protocol.hpp"

using namespace otsdec;

namespace {

struct Setup {
  RingContextPtr ring;
  HeParams he;
  KeyPair kp;
  BlindingKeyPair pair;
  BlindedSecretKey bkey;
  Ciphertext ct;
  BlindedCiphertext bct;

  explicit Setup(unsigned log2_d)
      : ring(RingContext::make(
            1u << log2_d,
            RingContext::find_ntt_moduli(1u << log2_d, 23, 1))),
        he(make_he_params(ring)) {
    Rng rng(1);
    kp = keygen(he, rng);
    pair = make_composite_blinding_key(ring, 6, 3, 2, rng);
    bkey = blind_secret_key(kp.sk, pair);
    Plaintext m = random_plaintext(he, rng);
    ct = encrypt(he, kp.pk, m, rng);
    bct = blind_decrypt(bkey, ct);
  }
};

Setup& setup_for(unsigned log2_d) {
  static std::map<unsigned, std::unique_ptr<Setup>> cache;
  auto it = cache.find(log2_d);
  if (it == cache.end())
    it = cache.emplace(log2_d, std::make_unique<Setup>(log2_d)).first;
  return *it->second;
}

}  // namespace

static void BM_NttForward(benchmark::State& state) {
  auto& s = setup_for(static_cast<unsigned>(state.range(0)));
  RnsPoly p = s.ct.u;
  for (auto _ : state) {
    RnsPoly q = p;
    ntt_forward_inplace(q);
    benchmark::DoNotOptimize(q.values().data());
  }
  state.SetComplexityN(s.ring->degree());
}
BENCHMARK(BM_NttForward)->DenseRange(12, 16)->Complexity(benchmark::oNLogN);

static void BM_PolyMul(benchmark::State& state) {
  auto& s = setup_for(static_cast<unsigned>(state.range(0)));
  for (auto _ : state) {
    RnsPoly r = poly_mul(s.ct.u, s.ct.v);
    benchmark::DoNotOptimize(r.values().data());
  }
}
BENCHMARK(BM_PolyMul)->DenseRange(12, 15);

static void BM_SparseDenseMul(benchmark::State& state) {
  auto& s = setup_for(static_cast<unsigned>(state.range(0)));
  RnsPoly w = s.bct.u;
  for (auto _ : state) {
    sparse_dense_apply(s.pair.factors[0], w);
    benchmark::DoNotOptimize(w.values().data());
  }
}
BENCHMARK(BM_SparseDenseMul)->DenseRange(12, 16);

static void BM_BaselineDecrypt(benchmark::State& state) {
  auto& s = setup_for(static_cast<unsigned>(state.range(0)));
  Plaintext out;
  for (auto _ : state) {
    decrypt_into(s.he, s.kp.sk, s.ct, out);
    benchmark::DoNotOptimize(out.values.data());
  }
}
BENCHMARK(BM_BaselineDecrypt)->DenseRange(12, 16);

static void BM_LocalDecrypt(benchmark::State& state) {
  auto& s = setup_for(static_cast<unsigned>(state.range(0)));
  Plaintext out;
  for (auto _ : state) {
    local_decrypt_into(s.he, s.pair, s.bct, out);
    benchmark::DoNotOptimize(out.values.data());
  }
}
BENCHMARK(BM_LocalDecrypt)->DenseRange(12, 16);

static void BM_BlindDecrypt(benchmark::State& state) {
  auto& s = setup_for(static_cast<unsigned>(state.range(0)));
  for (auto _ : state) {
    BlindedCiphertext bct = blind_decrypt(s.bkey, s.ct);
    benchmark::DoNotOptimize(bct.u.values().data());
  }
}
BENCHMARK(BM_BlindDecrypt)->DenseRange(12, 14);

BENCHMARK_MAIN();
