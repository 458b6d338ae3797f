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

#include "otsdec/wire.hpp"

#include <algorithm>
#include <cstring>

namespace otsdec {
namespace wire {

void put_u8(Bytes& b, std::uint8_t v) { b.push_back(v); }

void put_u32(Bytes& b, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(Bytes& b, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) b.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint8_t Reader::u8() {
  if (remaining() < 1) throw MalformedFrame("truncated payload");
  return *p_++;
}

std::uint32_t Reader::u32() {
  if (remaining() < 4) throw MalformedFrame("truncated payload");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(*p_++) << (8 * i);
  return v;
}

std::uint64_t Reader::u64() {
  if (remaining() < 8) throw MalformedFrame("truncated payload");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(*p_++) << (8 * i);
  return v;
}

void Reader::bytes(std::uint8_t* out, std::size_t n) {
  if (remaining() < n) throw MalformedFrame("truncated payload");
  std::memcpy(out, p_, n);
  p_ += n;
}

void Reader::expect_end() const {
  if (remaining() != 0) throw MalformedFrame("trailing bytes in payload");
}

Bytes encode_frame(const Frame& f) {
  Bytes out;
  out.reserve(10 + f.payload.size());
  out.insert(out.end(), kMagic, kMagic + 4);
  put_u8(out, kVersion);
  put_u8(out, f.msg_type);
  put_u32(out, static_cast<std::uint32_t>(f.payload.size()));
  out.insert(out.end(), f.payload.begin(), f.payload.end());
  return out;
}

void FrameReader::feed(const std::uint8_t* data, std::size_t len) {
  buf_.insert(buf_.end(), data, data + len);
}

bool FrameReader::next(Frame& out) {
  // Compact occasionally.
  if (pos_ > 0 && pos_ == buf_.size()) {
    buf_.clear();
    pos_ = 0;
  }
  const std::size_t avail = buf_.size() - pos_;
  if (avail < 10) return false;
  const std::uint8_t* h = buf_.data() + pos_;
  if (std::memcmp(h, kMagic, 4) != 0) throw MalformedFrame("bad magic");
  if (h[4] != kVersion) throw UnsupportedVersion();
  std::uint32_t len = 0;
  for (int i = 0; i < 4; ++i) len |= static_cast<std::uint32_t>(h[6 + i]) << (8 * i);
  if (len > kMaxPayload) throw MalformedFrame("payload too large");
  if (avail < 10 + static_cast<std::size_t>(len)) return false;
  out.msg_type = h[5];
  out.payload.assign(h + 10, h + 10 + len);
  pos_ += 10 + len;
  return true;
}

// ---------------------------------------------------------------------------
// Polynomials
// ---------------------------------------------------------------------------

namespace {

void encode_header(Bytes& out, const RingContext& ring, Domain domain,
                   std::uint8_t encoding) {
  put_u32(out, ring.degree());
  put_u8(out, static_cast<std::uint8_t>(ring.limb_count()));
  for (std::size_t i = 0; i < ring.limb_count(); ++i)
    put_u64(out, ring.limb(i).q);
  put_u8(out, static_cast<std::uint8_t>(domain));
  put_u8(out, encoding);
}

struct Header {
  std::uint32_t d;
  std::uint8_t L;
  Domain domain;
  std::uint8_t encoding;
};

Header decode_header(Reader& r, const RingContextPtr& ctx) {
  Header h;
  h.d = r.u32();
  h.L = r.u8();
  if (h.d != ctx->degree() || h.L != ctx->limb_count())
    throw MalformedFrame("ring shape mismatch");
  for (std::size_t i = 0; i < ctx->limb_count(); ++i) {
    if (r.u64() != ctx->limb(i).q) throw MalformedFrame("modulus mismatch");
  }
  std::uint8_t dom = r.u8();
  if (dom > 1) throw MalformedFrame("bad domain flag");
  h.domain = static_cast<Domain>(dom);
  h.encoding = r.u8();
  if (h.encoding > 1) throw MalformedFrame("bad encoding flag");
  return h;
}

}  // namespace

void encode_poly(Bytes& out, const RnsPoly& p) {
  const auto& ring = p.ring();
  encode_header(out, ring, p.domain(), 0);
  for (std::size_t i = 0; i < ring.limb_count(); ++i)
    for (u64 v : p.limb(i)) put_u64(out, v);
}

Bytes encode_poly(const RnsPoly& p) {
  Bytes out;
  encode_poly(out, p);
  return out;
}

RnsPoly decode_poly(Reader& r, const RingContextPtr& ctx) {
  Header h = decode_header(r, ctx);
  if (h.encoding != 0) throw MalformedFrame("expected dense encoding");
  RnsPoly p(ctx, h.domain);
  for (std::size_t i = 0; i < ctx->limb_count(); ++i) {
    const u64 q = ctx->limb(i).q;
    for (u64& v : p.limb(i)) {
      v = r.u64();
      if (v >= q) throw ResidueOutOfRange();
    }
  }
  return p;
}

void encode_sparse(Bytes& out, const SparsePoly& s) {
  const auto& ring = *s.ring;
  encode_header(out, ring, Domain::kCoeff, 1);
  put_u32(out, s.weight);
  for (std::uint32_t j = 0; j < s.weight; ++j) {
    put_u32(out, s.indices[j]);
    for (std::size_t i = 0; i < ring.limb_count(); ++i)
      put_u64(out, s.value(j, i));
  }
}

SparsePoly decode_sparse(Reader& r, const RingContextPtr& ctx) {
  Header h = decode_header(r, ctx);
  if (h.encoding != 1) throw MalformedFrame("expected sparse encoding");
  SparsePoly s;
  s.ring = ctx;
  s.weight = r.u32();
  if (s.weight > ctx->degree()) throw MalformedFrame("weight exceeds degree");
  s.indices.resize(s.weight);
  s.values.resize(std::size_t{s.weight} * ctx->limb_count());
  std::uint32_t prev = 0;
  for (std::uint32_t j = 0; j < s.weight; ++j) {
    s.indices[j] = r.u32();
    if (s.indices[j] >= ctx->degree() || (j > 0 && s.indices[j] <= prev))
      throw MalformedFrame("indices must be ascending and in range");
    prev = s.indices[j];
    for (std::size_t i = 0; i < ctx->limb_count(); ++i) {
      u64 v = r.u64();
      if (v >= ctx->limb(i).q) throw ResidueOutOfRange();
      s.values[std::size_t{j} * ctx->limb_count() + i] = v;
    }
  }
  return s;
}

void encode_ct(Bytes& out, const Ciphertext& ct) {
  encode_poly(out, ct.u);
  encode_poly(out, ct.v);
}

Ciphertext decode_ct(Reader& r, const RingContextPtr& ctx) {
  Ciphertext ct;
  ct.u = decode_poly(r, ctx);
  ct.v = decode_poly(r, ctx);
  if (ct.u.domain() != Domain::kCoeff || ct.v.domain() != Domain::kCoeff)
    throw MalformedFrame("ciphertext components must be COEFF domain");
  return ct;
}

void encode_blinded_ct(Bytes& out, const BlindedCiphertext& ct) {
  encode_poly(out, ct.u);
  encode_poly(out, ct.v);
}

BlindedCiphertext decode_blinded_ct(Reader& r, const RingContextPtr& ctx) {
  BlindedCiphertext ct;
  ct.u = decode_poly(r, ctx);
  ct.v = decode_poly(r, ctx);
  return ct;
}

Bytes make_setup_payload(const RingContext& ring, const RnsPoly& s_tilde) {
  Bytes out;
  std::string desc = ring.descriptor();
  put_u32(out, static_cast<std::uint32_t>(desc.size()));
  out.insert(out.end(), desc.begin(), desc.end());
  encode_poly(out, s_tilde);
  return out;
}

Bytes make_err_payload(std::uint8_t code, const std::string& text) {
  Bytes out;
  put_u8(out, code);
  put_u32(out, static_cast<std::uint32_t>(text.size()));
  out.insert(out.end(), text.begin(), text.end());
  return out;
}

}  // namespace wire
}  // namespace otsdec
