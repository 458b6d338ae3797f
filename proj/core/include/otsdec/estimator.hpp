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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "otsdec/ring.hpp"

namespace otsdec {

// ---------------------------------------------------------------------------
// Counting attacks
// ---------------------------------------------------------------------------

/// log2 of binomial(n, k), exact for small arguments, lgamma otherwise.
double log2_binomial(std::uint64_t n, std::uint64_t k);

/// Exhaustive key-space size: log2 min(C(d,h) * (q-1)^h, 3^d) for a ternary
/// secret distribution.
double brute_force_bits(std::uint32_t d, double q, std::uint32_t h);

/// Meet-in-the-middle halves the exponent.
double mitm_bits(std::uint32_t d, double q, std::uint32_t h);

/// Enumeration space of a two-factor blinding key, meet-in-the-middle:
/// 0.5 * log2( C(d,h1) (q-1)^h1 * C(d,h2) (q2-1)^h2 ).
double composite_enum_bits(std::uint32_t d, double q, std::uint32_t h1,
                           std::uint32_t h2, double q2 = 2.0);

// ---------------------------------------------------------------------------
// Lattice cost model
// ---------------------------------------------------------------------------

double expected_ternary_norm(std::uint32_t d);          // sqrt(2d/3)
double expected_sparse_norm(double q, std::uint32_t h); // q * sqrt(h/12)

/// Length ratio of the planted vector to the Gaussian-heuristic shortest
/// vector: c = sqrt(2*pi*e * |s| * |t| / (d * q)).
double target_ratio_c(std::uint32_t d, double q, double s_norm,
                      double t_norm);

/// Balancing scale alpha = |s| / |t|.
double alpha_balance(double s_norm, double t_norm);

/// log2 of BKZ core operations: poly(beta) + log2(dim) + 7 with
/// poly(beta) = 0.00405892 beta^2 - 0.337913 beta + 34.9018.
double bkz_poly(double beta);
double bkz_log_ops(double beta, std::uint32_t dim);

inline constexpr std::uint32_t kBetaFloor = 50;  // delta model unreliable below

/// Root Hermite factor of BKZ-beta (limiting form, dimension-free):
/// delta = ((beta/(2*pi*e)) * (pi*beta)^(1/beta))^(1/(2(beta-1))).
/// Betas under the floor are clamped to the floor's value.
double delta_from_beta(double beta);

/// Smallest block size in [kBetaFloor, max_beta] reaching the target root
/// Hermite factor; nullopt when none does (attack infeasible).
std::optional<std::uint32_t> beta_from_delta(double delta,
                                             std::uint32_t max_beta);

/// Gaussian-heuristic attainment factor (dim/(2*pi*e))^(1/(2*dim)).
double gaussian_heuristic_delta(std::uint32_t dim);

// ---------------------------------------------------------------------------
// Zero-forced attack
// ---------------------------------------------------------------------------

/// Probability that r guessed zero positions avoid all h nonzeros of some
/// negacyclic shift: single-guess p0 = C(d-r,h)/C(d,h) amplified over the d
/// shifts as 1 - (1-p0)^d.
double zf_success_prob(std::uint32_t d, std::uint32_t h, std::uint32_t r);

/// Single-guess probability alone (exact hypergeometric).
double zf_single_guess_prob(std::uint32_t d, std::uint32_t h, std::uint32_t r);

struct ZfCost {
  double bits = 0.0;        // log2 expected operations
  std::uint32_t r = 0;      // minimizing guess size
  std::uint32_t beta = 0;   // block size charged for the residual lattice
};

/// Residual lattice dimension the guessing phase reduces to. Guessing past
/// it cannot help (the block-size floor has been reached), and stopping
/// short leaves a dimension whose required block size exceeds the lattice
/// dimension for the sparse-target ratios arising here. Calibration is
/// recorded in the estimator report notes.
inline constexpr std::uint32_t kZfResidualDim = 320;

/// Cheapest zero-forced attack: min over r of guess bits plus one BKZ call
/// on the 2(d-r)-dimensional residual lattice at the clamped block size.
ZfCost zf_attack_bits(std::uint32_t d, double q, std::uint32_t h);

// ---------------------------------------------------------------------------
// Reports and parameter search
// ---------------------------------------------------------------------------

struct AttackReport {
  std::uint32_t d = 0;
  double log2_q = 0.0;
  std::uint32_t h = 0, h1 = 0, h2 = 0;
  double brute_bits = 0.0;
  double mitm_bits = 0.0;
  double composite_enum_bits = 0.0;
  ZfCost zf;
  double lattice_c_ratio = 0.0;  // full-dimension target ratio

  double security_bits() const;
  bool feasible(unsigned lambda) const { return security_bits() >= lambda; }
  std::string to_text() const;
  std::string to_csv_row() const;  // d,logq,h,brute,mitm,enum,zf_bits,r,beta,feasible
};

AttackReport estimate_attacks(std::uint32_t d, double log2_q, std::uint32_t h,
                              std::uint32_t h1, std::uint32_t h2,
                              std::uint64_t q2 = 2);

/// Smallest h2 with h1*h2 - min(h1,h2) >= h.
std::uint32_t min_h2_for_weight(std::uint32_t h1, std::uint32_t h);

struct ParamChoice {
  std::uint32_t h = 0;
  unsigned log_q = 0;
  std::uint32_t h1 = 0, h2 = 0;
  std::uint64_t q2 = 2;
  AttackReport report;
};

/// Parameter search: smallest h passing the zero-forced gate at lambda,
/// then the smallest integer log q passing the composite enumeration gate
/// (evaluated at the 128-bit enumeration floor; see report notes).
ParamChoice find_params(unsigned lambda, unsigned log2_d);

// ---------------------------------------------------------------------------
// Lattice constructions (single-limb research dimensions)
// ---------------------------------------------------------------------------

struct LatticeBasis {
  enum class Kind : std::uint8_t { kFull, kZeroForced };
  Kind kind = Kind::kFull;
  std::uint32_t dim = 0;  // matrix is dim x dim
  u64 q = 0;
  std::int64_t alpha_num = 1, alpha_den = 1;
  std::vector<std::uint32_t> excluded;      // J, zero-forced only
  std::vector<std::vector<std::int64_t>> rows;
};

inline constexpr std::uint32_t kLatticeMaxDegree = 256;

/// L(s~, alpha) = ((alpha I, S~), (0, q I)) with S~ rows the negacyclic
/// shifts of s~. alpha is the rational alpha_num/alpha_den; both blocks are
/// scaled by alpha_den to stay integral.
LatticeBasis build_lattice_basis(std::span<const u64> s_tilde, u64 q,
                                 std::int64_t alpha_num,
                                 std::int64_t alpha_den);

/// Zero-forced variant of size 2(d-r): rows i and columns j restricted to
/// indices outside J.
LatticeBasis build_zf_basis(std::span<const u64> s_tilde, u64 q,
                            std::int64_t alpha_num, std::int64_t alpha_den,
                            std::span<const std::uint32_t> J);

struct NtruInstance {
  RnsPoly ratio;      // s * t^{-1}
  double gamma_s = 0.0, gamma_t = 0.0;
  mpz_class q;
  double s_norm = 0.0, t_norm = 0.0;  // witness norms
};

double l2_norm(const RnsPoly& p);  // signed-lift Euclidean norm, L == 1 only

/// Builds the published ratio from witnesses and records their norms;
/// throws if t is not invertible.
NtruInstance make_ntru_instance(const RnsPoly& s, const RnsPoly& t);

}  // namespace otsdec
