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

// Independent reference implementations used only by tests. Everything here
// is deliberately naive (quadratic schoolbook loops, dense linear algebra,
// exhaustive enumeration) and never calls into the code paths it checks.

#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace oracle {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

inline u64 omul(u64 a, u64 b, u64 q) {
  return static_cast<u64>(static_cast<u128>(a) * b % q);
}
inline u64 oadd(u64 a, u64 b, u64 q) {
  u64 s = a + b;
  return s >= q ? s - q : s;
}
inline u64 osub(u64 a, u64 b, u64 q) { return a >= b ? a - b : a + q - b; }

/// O(d^2) negacyclic schoolbook product with the explicit X^d = -1 wrap.
inline std::vector<u64> schoolbook_negacyclic(std::span<const u64> a,
                                              std::span<const u64> b, u64 q) {
  const std::size_t d = a.size();
  std::vector<u64> res(d, 0);
  for (std::size_t i = 0; i < d; ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < d; ++j) {
      u64 prod = omul(a[i], b[j], q);
      std::size_t k = i + j;
      if (k >= d) {
        res[k - d] = osub(res[k - d], prod, q);
      } else {
        res[k] = oadd(res[k], prod, q);
      }
    }
  }
  return res;
}

/// Dense negacyclic multiplication matrix M with M[k][i] = (p * x^i)_k, so
/// that (p * r)_k = sum_i M[k][i] r_i.
inline std::vector<std::vector<u64>> negacyclic_matrix(std::span<const u64> p,
                                                       u64 q) {
  const std::size_t d = p.size();
  std::vector<std::vector<u64>> m(d, std::vector<u64>(d, 0));
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t k = 0; k < d; ++k) {
      // (p * x^i)_k = p_{k-i} if k >= i else -p_{d+k-i}
      if (k >= i) {
        m[k][i] = p[k - i];
      } else {
        u64 v = p[d + k - i];
        m[k][i] = v == 0 ? 0 : q - v;
      }
    }
  }
  return m;
}

inline u64 inv_mod_prime(u64 a, u64 q) {
  u64 r = 1, base = a % q, e = q - 2;
  while (e) {
    if (e & 1) r = omul(r, base, q);
    base = omul(base, base, q);
    e >>= 1;
  }
  return r;
}

/// Solves the negacyclic system M r = e_0 by Gaussian elimination mod q.
/// Returns the coefficients of p^{-1}, or nullopt when the multiplication
/// matrix is singular (p is a zero divisor).
inline std::optional<std::vector<u64>> invert_by_linear_algebra(
    std::span<const u64> p, u64 q) {
  const std::size_t d = p.size();
  auto m = negacyclic_matrix(p, q);
  std::vector<u64> rhs(d, 0);
  rhs[0] = 1;
  for (std::size_t col = 0; col < d; ++col) {
    std::size_t pivot = col;
    while (pivot < d && m[pivot][col] == 0) ++pivot;
    if (pivot == d) return std::nullopt;
    std::swap(m[pivot], m[col]);
    std::swap(rhs[pivot], rhs[col]);
    u64 inv = inv_mod_prime(m[col][col], q);
    for (std::size_t j = 0; j < d; ++j) m[col][j] = omul(m[col][j], inv, q);
    rhs[col] = omul(rhs[col], inv, q);
    for (std::size_t row = 0; row < d; ++row) {
      if (row == col || m[row][col] == 0) continue;
      u64 f = m[row][col];
      for (std::size_t j = 0; j < d; ++j)
        m[row][j] = osub(m[row][j], omul(f, m[col][j], q), q);
      rhs[row] = osub(rhs[row], omul(f, rhs[col], q), q);
    }
  }
  return rhs;
}

/// Exact binomial coefficient.
inline mpz_class binomial_exact(unsigned n, unsigned k) {
  mpz_class out;
  mpz_bin_uiui(out.get_mpz_t(), n, k);
  return out;
}

/// All h-element subsets of [0, d), lexicographic.
inline std::vector<std::vector<std::uint32_t>> enumerate_supports(
    std::uint32_t d, std::uint32_t h) {
  std::vector<std::vector<std::uint32_t>> out;
  std::vector<std::uint32_t> cur(h);
  for (std::uint32_t i = 0; i < h; ++i) cur[i] = i;
  for (;;) {
    out.push_back(cur);
    int i = static_cast<int>(h) - 1;
    while (i >= 0 && cur[i] == d - h + i) --i;
    if (i < 0) break;
    ++cur[i];
    for (std::uint32_t j = i + 1; j < h; ++j) cur[j] = cur[j - 1] + 1;
  }
  return out;
}

/// Upper chi-square critical value via the Wilson-Hilferty approximation.
inline double chi2_critical(unsigned df, double z_upper) {
  double a = 2.0 / (9.0 * df);
  double t = 1.0 - a + z_upper * std::sqrt(a);
  return df * t * t * t;
}

}  // namespace oracle
