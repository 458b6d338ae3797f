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

#include "otsdec/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "otsdec/wire.hpp"

namespace otsdec {

namespace {
using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}
}  // namespace

BenchReport bench_decrypt(const HeParams& he, unsigned lambda,
                          std::uint32_t h, std::uint32_t h1, std::uint32_t h2,
                          unsigned iters, u64 seed, unsigned warmup) {
  const auto& ring = he.ctx();
  Rng rng(seed);
  auto kp = keygen(he, rng);
  auto pair = make_composite_blinding_key(he.ring, h1, h2, 2, rng);
  auto bkey = blind_secret_key(kp.sk, pair);

  // A small rotating pool of ciphertexts keeps memory flat while varying
  // the inputs across iterations.
  const unsigned pool = 4;
  std::vector<Ciphertext> cts;
  std::vector<Plaintext> msgs;
  for (unsigned i = 0; i < pool; ++i) {
    msgs.push_back(random_plaintext(he, rng));
    cts.push_back(encrypt(he, kp.pk, msgs.back(), rng));
  }
  std::vector<BlindedCiphertext> blinded;
  for (const auto& ct : cts) blinded.push_back(blind_decrypt(bkey, ct));

  // Correctness gate: all outputs must match before any timing counts.
  for (unsigned i = 0; i < pool; ++i) {
    Plaintext base = decrypt(he, kp.sk, cts[i]);
    Plaintext local = local_decrypt(he, pair, blinded[i]);
    if (!(base == msgs[i]) || !(local == msgs[i]))
      throw OutputMismatchError("decryption paths disagree; not timing");
  }

  Plaintext scratch;
  for (unsigned i = 0; i < warmup; ++i) {
    decrypt_into(he, kp.sk, cts[i % pool], scratch);
    local_decrypt_into(he, pair, blinded[i % pool], scratch);
  }
  (void)warmup;

  BenchReport rep;
  rep.d = ring.degree();
  rep.logq_total = ring.log2_modulus();
  rep.limbs = ring.limb_count();
  rep.h = h;
  rep.h1 = h1;
  rep.h2 = h2;
  rep.lambda = lambda;
  rep.iters = iters;

  // The two paths run in short interleaved chunks so clock-speed drift and
  // scheduler noise hit both sides alike.
  OpCounter base_ops, local_ops;
  const unsigned chunk = std::max(1u, iters / 20);
  unsigned done = 0;
  while (done < iters) {
    const unsigned n = std::min(chunk, iters - done);
    auto t0 = Clock::now();
    for (unsigned i = 0; i < n; ++i)
      decrypt_into(he, kp.sk, cts[(done + i) % pool], scratch,
                   (done + i) == 0 ? &base_ops : nullptr);
    rep.baseline_total_ms += ms_since(t0);
    t0 = Clock::now();
    for (unsigned i = 0; i < n; ++i)
      local_decrypt_into(he, pair, blinded[(done + i) % pool], scratch,
                         (done + i) == 0 ? &local_ops : nullptr);
    rep.local_total_ms += ms_since(t0);
    done += n;
  }

  rep.baseline_ops = base_ops.scalar_mults;
  rep.local_ops = local_ops.scalar_mults;
  rep.speedup = 1.0 - rep.local_total_ms / rep.baseline_total_ms;
  const double per_limb =
      static_cast<double>(rep.baseline_ops) / static_cast<double>(rep.limbs);
  rep.a_fit = (per_limb - rep.d) /
              (static_cast<double>(rep.d) * ring.log2_degree());
  return rep;
}

std::string BenchReport::to_text() const {
  std::ostringstream os;
  os << "decryption benchmark: d=" << d << " log2(q)=" << logq_total
     << " L=" << limbs << " h=" << h << " (h1=" << h1 << ", h2=" << h2
     << ") lambda=" << lambda << "\n";
  os << "  iterations        " << iters << "\n";
  os << "  baseline total    " << baseline_total_ms << " ms ("
     << baseline_ops << " scalar mults/iter)\n";
  os << "  local total       " << local_total_ms << " ms (" << local_ops
     << " scalar mults/iter)\n";
  os << "  speedup           " << speedup * 100.0 << "%\n";
  os << "  a_fit             " << a_fit << "\n";
  return os.str();
}

std::string BenchReport::csv_header() {
  return "d,logq_total,L,h,h1,h2,lambda,iters,baseline_ms,local_ms,speedup,"
         "a_fit";
}

std::string BenchReport::to_csv_row() const {
  std::ostringstream os;
  os << d << ',' << logq_total << ',' << limbs << ',' << h << ',' << h1 << ','
     << h2 << ',' << lambda << ',' << iters << ',' << baseline_total_ms << ','
     << local_total_ms << ',' << speedup << ',' << a_fit;
  return os.str();
}

SpaceReport space_report(const HeParams& he, std::uint32_t h1,
                         std::uint32_t h2, u64 seed) {
  const auto& ring = he.ctx();
  Rng rng(seed);
  auto kp = keygen(he, rng);
  auto pair = make_composite_blinding_key(he.ring, h1, h2, 2, rng);
  auto bkey = blind_secret_key(kp.sk, pair);
  Plaintext m = random_plaintext(he, rng);
  Ciphertext ct = encrypt(he, kp.pk, m, rng);
  BlindedCiphertext bct = blind_decrypt(bkey, ct);

  SpaceReport rep;
  rep.d = ring.degree();
  rep.limbs = ring.limb_count();
  rep.h1 = h1;
  rep.h2 = h2;

  rep.baseline_key_bytes = wire::encode_poly(kp.sk.s_ntt).size();
  // Inverse-transform twiddles: d residues per limb, same width as any
  // serialized residue vector.
  {
    wire::Bytes tables;
    for (std::size_t i = 0; i < ring.limb_count(); ++i)
      for (u64 v : ring.limb(i).inv_roots) wire::put_u64(tables, v);
    rep.baseline_tables_bytes = tables.size();
  }
  {
    wire::Bytes b;
    wire::encode_ct(b, ct);
    rep.baseline_ct_bytes = b.size();
  }
  {
    wire::Bytes b;
    for (const auto& f : pair.factors) wire::encode_sparse(b, f);
    rep.ours_factors_bytes = b.size();
  }
  {
    wire::Bytes b;
    wire::encode_blinded_ct(b, bct);
    rep.ours_ct_bytes = b.size();
  }

  const std::uint64_t ell = rep.ell;
  const std::uint64_t dl = std::uint64_t{rep.d} * rep.limbs;
  rep.baseline_bits_model = 4 * ell * dl;
  rep.ours_bits_model =
      2 * ell * (std::uint64_t{h1} + h2) * rep.limbs + 2 * ell * dl;
  rep.ratio = static_cast<double>(rep.ours_total_bytes()) /
              static_cast<double>(rep.baseline_total_bytes());

  // Measured bytes may exceed the analytic model only by header overhead
  // (and the factored key's index fields).
  const long long slack = 64 * static_cast<long long>(rep.limbs + 1) +
                          8 * (std::int64_t{h1} + h2);
  auto close = [&](std::size_t measured, std::uint64_t model_bits) {
    return std::llabs(static_cast<long long>(measured) -
                      static_cast<long long>(model_bits / 8)) <= slack;
  };
  require(close(rep.baseline_total_bytes(), rep.baseline_bits_model),
          "baseline size diverges from the analytic model");
  require(close(rep.ours_total_bytes(), rep.ours_bits_model),
          "client-side size diverges from the analytic model");
  return rep;
}

std::string SpaceReport::to_text() const {
  std::ostringstream os;
  os << "decryption working-set sizes: d=" << d << " L=" << limbs
     << " h1=" << h1 << " h2=" << h2 << "\n";
  os << "  baseline key (eval form)   " << baseline_key_bytes << " B\n";
  os << "  baseline inverse tables    " << baseline_tables_bytes << " B\n";
  os << "  baseline ciphertext        " << baseline_ct_bytes << " B\n";
  os << "  baseline total             " << baseline_total_bytes() << " B ("
     << baseline_bits_model / 8 << " B model)\n";
  os << "  ours factored key          " << ours_factors_bytes << " B\n";
  os << "  ours blinded ciphertext    " << ours_ct_bytes << " B\n";
  os << "  ours total                 " << ours_total_bytes() << " B ("
     << ours_bits_model / 8 << " B model)\n";
  os << "  ratio ours/baseline        " << ratio << "\n";
  return os.str();
}

std::string SpaceReport::csv_header() { return "d,ell,component,bits"; }

std::string SpaceReport::to_csv_rows() const {
  std::ostringstream os;
  auto row = [&](const char* name, std::size_t bytes) {
    os << d << ',' << ell << ',' << name << ',' << bytes * 8 << "\n";
  };
  row("baseline_key", baseline_key_bytes);
  row("baseline_tables", baseline_tables_bytes);
  row("baseline_ct", baseline_ct_bytes);
  row("ours_factors", ours_factors_bytes);
  row("ours_ct", ours_ct_bytes);
  return os.str();
}

}  // namespace otsdec
