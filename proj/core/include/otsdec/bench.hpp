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

#include <string>

#include "otsdec/protocol.hpp"

namespace otsdec {

/// Timing comparison of baseline decryption against the outsourced path.
/// Both paths decrypt the same ciphertexts; timing is only reported after
/// every output matched (correctness-gated benchmarking). Wall clock is
/// taken around the decryption calls alone.
struct BenchReport {
  std::uint32_t d = 0;
  double logq_total = 0.0;
  std::size_t limbs = 0;
  std::uint32_t h = 0, h1 = 0, h2 = 0;
  unsigned lambda = 0;
  unsigned iters = 0;
  double baseline_total_ms = 0.0;
  double local_total_ms = 0.0;
  double speedup = 0.0;  // 1 - local/baseline
  double a_fit = 0.0;    // fitted constant of the a*d*log2(d) + d model
  std::uint64_t baseline_ops = 0;
  std::uint64_t local_ops = 0;

  std::string to_text() const;
  static std::string csv_header();
  std::string to_csv_row() const;
};

/// The two decryption paths disagreed on some output; no timing is reported.
class OutputMismatchError : public std::runtime_error {
 public:
  explicit OutputMismatchError(const std::string& what)
      : std::runtime_error(what) {}
};

/// Runs `iters` decryptions per path after `warmup` discarded iterations.
/// Single-threaded by design.
BenchReport bench_decrypt(const HeParams& he, unsigned lambda,
                          std::uint32_t h, std::uint32_t h1, std::uint32_t h2,
                          unsigned iters, u64 seed, unsigned warmup = 10);

/// Itemized client-side storage accounting, measured from actual serialized
/// sizes, with the analytic model asserted alongside.
struct SpaceReport {
  std::uint32_t d = 0;
  unsigned ell = 64;  // bits per stored residue
  std::size_t limbs = 0;
  std::uint32_t h1 = 0, h2 = 0;
  // measured bytes
  std::size_t baseline_key_bytes = 0;    // s in evaluation form
  std::size_t baseline_tables_bytes = 0; // inverse-transform twiddles
  std::size_t baseline_ct_bytes = 0;     // (u, v)
  std::size_t ours_factors_bytes = 0;    // factored unblinding key
  std::size_t ours_ct_bytes = 0;         // blinded (u~, v)
  // analytic bits
  std::uint64_t baseline_bits_model = 0; // 4 * ell * d * L
  std::uint64_t ours_bits_model = 0;     // 2 ell (h1+h2) + 2 ell d L
  double ratio = 0.0;                    // measured ours / baseline

  std::size_t baseline_total_bytes() const {
    return baseline_key_bytes + baseline_tables_bytes + baseline_ct_bytes;
  }
  std::size_t ours_total_bytes() const {
    return ours_factors_bytes + ours_ct_bytes;
  }
  std::string to_text() const;
  static std::string csv_header();
  std::string to_csv_rows() const;  // one row per component
};

SpaceReport space_report(const HeParams& he, std::uint32_t h1,
                         std::uint32_t h2, u64 seed);

}  // namespace otsdec
