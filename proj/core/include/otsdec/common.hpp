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
#include <stdexcept>
#include <string>

namespace otsdec {

/// Violated precondition or broken object invariant (domain mismatch,
/// incompatible contexts, malformed arguments). Maps to CLI exit code 2.
class ContractError : public std::logic_error {
 public:
  explicit ContractError(const std::string& what) : std::logic_error(what) {}
};

/// No parameter choice satisfies the requested security target.
class InfeasibleParamsError : public std::runtime_error {
 public:
  explicit InfeasibleParamsError(const std::string& what)
      : std::runtime_error(what) {}
};

/// Scalar-operation accounting for the inner-product stage of decryption
/// (the part the protocol moves off the client). Counts 64-bit
/// multiply-equivalents: one per butterfly or coefficient product, one per
/// deferred-reduction sweep entry. The rounded decode is shared by both
/// paths and is not counted. Callers pass nullptr when they do not care;
/// the hot loops only touch it once per pass.
struct OpCounter {
  std::uint64_t scalar_mults = 0;

  void add(std::uint64_t n) { scalar_mults += n; }
};

inline void require(bool cond, const char* msg) {
  if (!cond) throw ContractError(msg);
}

}  // namespace otsdec
