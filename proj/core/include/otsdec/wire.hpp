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

//
// Binary wire format (all integers little-endian, normative):
//
//   Frame     := magic "OTSD" | version u8 (0x01) | msg_type u8
//              | payload_len u32 | payload bytes
//
//   msg_type  := 0x01 SETUP      descriptor_len u32 | descriptor utf-8
//                                | SerializedPoly (s~, NTT domain)
//                0x02 STORE_CT   SerializedPoly u | SerializedPoly v
//                0x03 EVAL_ADD   id u32 | id u32
//                0x04 BLIND_DEC  count u32 | count * id u32
//                0x05 OK         op-specific (see service.hpp)
//                0x06 ERR        code u8 | text_len u32 | text utf-8
//
//   SerializedPoly := d u32 | L u8 | L * modulus u64 | domain u8
//                   | encoding u8 (0 dense, 1 sparse)
//                   | dense:  L * d * residue u64   (limb-major)
//                   | sparse: h u32 | h * (index u32 | L * residue u64)
//
// Decoders validate every residue against its modulus and reject
// truncated, oversized, or version-mismatched input.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "otsdec/he.hpp"
#include "otsdec/protocol.hpp"

namespace otsdec {
namespace wire {

inline constexpr char kMagic[4] = {'O', 'T', 'S', 'D'};
inline constexpr std::uint8_t kVersion = 0x01;
inline constexpr std::uint16_t kDefaultPort = 7740;
inline constexpr std::uint32_t kMaxPayload = 1u << 28;  // 256 MiB

enum MsgType : std::uint8_t {
  kSetup = 0x01,
  kStoreCt = 0x02,
  kEvalAdd = 0x03,
  kBlindDec = 0x04,
  kOk = 0x05,
  kErr = 0x06,
};

enum ErrCode : std::uint8_t {
  kErrProtocolOrder = 0x10,
  kErrUnknownId = 0x11,
  kErrMalformed = 0x12,
};

using Bytes = std::vector<std::uint8_t>;

/// Wire decode failure: truncated input, bad length, bad magic/version.
class MalformedFrame : public std::runtime_error {
 public:
  explicit MalformedFrame(const std::string& what)
      : std::runtime_error(what) {}
};

/// A residue failed validation against its modulus.
class ResidueOutOfRange : public MalformedFrame {
 public:
  ResidueOutOfRange() : MalformedFrame("residue out of range") {}
};

class UnsupportedVersion : public MalformedFrame {
 public:
  UnsupportedVersion() : MalformedFrame("unsupported frame version") {}
};

struct Frame {
  std::uint8_t msg_type = 0;
  Bytes payload;
};

Bytes encode_frame(const Frame& f);

/// Incremental frame parser; feed bytes as they arrive.
class FrameReader {
 public:
  void feed(const std::uint8_t* data, std::size_t len);
  /// Next complete frame, if any. Throws MalformedFrame/UnsupportedVersion
  /// as soon as a bad header is seen.
  bool next(Frame& out);

 private:
  Bytes buf_;
  std::size_t pos_ = 0;
};

// -- primitive writers/readers ----------------------------------------------

void put_u8(Bytes& b, std::uint8_t v);
void put_u32(Bytes& b, std::uint32_t v);
void put_u64(Bytes& b, std::uint64_t v);

/// Bounds-checked sequential reader over a payload.
class Reader {
 public:
  Reader(const std::uint8_t* data, std::size_t len) : p_(data), end_(data + len) {}
  explicit Reader(const Bytes& b) : Reader(b.data(), b.size()) {}
  std::uint8_t u8();
  std::uint32_t u32();
  std::uint64_t u64();
  void bytes(std::uint8_t* out, std::size_t n);
  std::size_t remaining() const { return static_cast<std::size_t>(end_ - p_); }
  void expect_end() const;

 private:
  const std::uint8_t* p_;
  const std::uint8_t* end_;
};

// -- polynomial serialization -------------------------------------------------

void encode_poly(Bytes& out, const RnsPoly& p);
Bytes encode_poly(const RnsPoly& p);

/// Decodes against an expected context; header (d, moduli) must match it.
RnsPoly decode_poly(Reader& r, const RingContextPtr& ctx);

void encode_sparse(Bytes& out, const SparsePoly& s);
SparsePoly decode_sparse(Reader& r, const RingContextPtr& ctx);

void encode_ct(Bytes& out, const Ciphertext& ct);
Ciphertext decode_ct(Reader& r, const RingContextPtr& ctx);

void encode_blinded_ct(Bytes& out, const BlindedCiphertext& ct);
BlindedCiphertext decode_blinded_ct(Reader& r, const RingContextPtr& ctx);

// -- message payload builders -------------------------------------------------

Bytes make_setup_payload(const RingContext& ring, const RnsPoly& s_tilde);
Bytes make_err_payload(std::uint8_t code, const std::string& text);

}  // namespace wire
}  // namespace otsdec
