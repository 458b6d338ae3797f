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
#include "otsdec/wire.hpp"

using namespace otsdec;
using wire::Bytes;

namespace {

RingContextPtr ring_8_1() {
  static RingContextPtr ctx =
      RingContext::make(8, RingContext::find_ntt_moduli(8, 20, 1));
  return ctx;
}

}  // namespace

TEST_CASE("zero polynomial at d=8, L=1 is header plus 64 zero bytes") {
  auto ctx = ring_8_1();
  RnsPoly zero(ctx, Domain::kCoeff);
  Bytes enc = wire::encode_poly(zero);
  // header: d u32 | L u8 | modulus u64 | domain u8 | encoding u8
  const std::size_t header = 4 + 1 + 8 + 1 + 1;
  REQUIRE(enc.size() == header + 64);
  for (std::size_t i = header; i < enc.size(); ++i) CHECK(enc[i] == 0);
}

TEST_CASE("dense polynomial round trip, 1000 random draws") {
  auto ctx = RingContext::make(32, RingContext::find_ntt_moduli(32, 30, 2));
  Rng rng(15);
  for (int t = 0; t < 1000; ++t) {
    RnsPoly p = sample_uniform(ctx, rng, t % 2 ? Domain::kNtt : Domain::kCoeff);
    Bytes enc = wire::encode_poly(p);
    wire::Reader r(enc);
    RnsPoly back = wire::decode_poly(r, ctx);
    r.expect_end();
    CHECK(back == p);
  }
}

TEST_CASE("sparse body length is 4 + h(4 + 8L)") {
  for (std::size_t L : {1ul, 3ul}) {
    auto ctx = RingContext::make(8, RingContext::find_ntt_moduli(8, 20, L));
    SparsePoly s;
    s.ring = ctx;
    s.weight = 1;
    s.indices = {3};
    s.values.assign(L, 1);
    Bytes enc;
    wire::encode_sparse(enc, s);
    const std::size_t header = 4 + 1 + 8 * L + 1 + 1;
    CHECK(enc.size() == header + 4 + (4 + 8 * L));
  }
}

TEST_CASE("sparse round trip and validation") {
  auto ctx = RingContext::make(16, RingContext::find_ntt_moduli(16, 20, 2));
  Rng rng(77);
  SparsePoly s;
  s.ring = ctx;
  s.weight = 3;
  s.indices = {1, 7, 12};
  s.values = {5, 6, 7, 8, 9, 10};
  Bytes enc;
  wire::encode_sparse(enc, s);
  wire::Reader r(enc);
  SparsePoly back = wire::decode_sparse(r, ctx);
  CHECK(back.indices == s.indices);
  CHECK(back.values == s.values);

  SUBCASE("descending indices rejected") {
    Bytes bad;
    SparsePoly t = s;
    t.indices = {7, 1, 12};
    wire::encode_sparse(bad, t);
    wire::Reader rr(bad);
    CHECK_THROWS_AS(wire::decode_sparse(rr, ctx), wire::MalformedFrame);
  }
}

TEST_CASE("decode rejects out-of-range residues") {
  auto ctx = ring_8_1();
  RnsPoly p(ctx, Domain::kCoeff);
  Bytes enc = wire::encode_poly(p);
  // residues start right after the header; poison one with q
  const std::size_t header = 4 + 1 + 8 + 1 + 1;
  u64 q = ctx->limb(0).q;
  for (int i = 0; i < 8; ++i) enc[header + i] = static_cast<std::uint8_t>(q >> (8 * i));
  wire::Reader r(enc);
  CHECK_THROWS_AS(wire::decode_poly(r, ctx), wire::ResidueOutOfRange);
}

TEST_CASE("decode rejects truncation and ring mismatches") {
  auto ctx = ring_8_1();
  Rng rng(3);
  RnsPoly p = sample_uniform(ctx, rng);
  Bytes enc = wire::encode_poly(p);

  SUBCASE("truncated") {
    Bytes cut(enc.begin(), enc.begin() + enc.size() / 2);
    wire::Reader r(cut);
    CHECK_THROWS_AS(wire::decode_poly(r, ctx), wire::MalformedFrame);
  }
  SUBCASE("wrong context") {
    auto other = RingContext::make(16, RingContext::find_ntt_moduli(16, 20, 1));
    wire::Reader r(enc);
    CHECK_THROWS_AS(wire::decode_poly(r, other), wire::MalformedFrame);
  }
}

TEST_CASE("ciphertext round trip") {
  auto ctx = RingContext::make(32, RingContext::find_ntt_moduli(32, 30, 2));
  Rng rng(8);
  Ciphertext ct{sample_uniform(ctx, rng), sample_uniform(ctx, rng), {}};
  Bytes enc;
  wire::encode_ct(enc, ct);
  wire::Reader r(enc);
  Ciphertext back = wire::decode_ct(r, ctx);
  CHECK(back.u == ct.u);
  CHECK(back.v == ct.v);
}

TEST_CASE("frame encoding and incremental parsing") {
  wire::Frame f{wire::kStoreCt, {1, 2, 3, 4, 5}};
  Bytes enc = wire::encode_frame(f);
  CHECK(enc[0] == 'O');
  CHECK(enc[1] == 'T');
  CHECK(enc[2] == 'S');
  CHECK(enc[3] == 'D');
  CHECK(enc[4] == 0x01);
  CHECK(enc[5] == wire::kStoreCt);

  SUBCASE("byte-at-a-time feeding") {
    wire::FrameReader reader;
    wire::Frame out;
    for (std::size_t i = 0; i + 1 < enc.size(); ++i) {
      reader.feed(&enc[i], 1);
      CHECK(!reader.next(out));
    }
    reader.feed(&enc.back(), 1);
    REQUIRE(reader.next(out));
    CHECK(out.msg_type == wire::kStoreCt);
    CHECK(out.payload == f.payload);
  }

  SUBCASE("two frames in one buffer") {
    Bytes two = enc;
    two.insert(two.end(), enc.begin(), enc.end());
    wire::FrameReader reader;
    reader.feed(two.data(), two.size());
    wire::Frame a, b;
    REQUIRE(reader.next(a));
    REQUIRE(reader.next(b));
    CHECK(a.payload == b.payload);
  }

  SUBCASE("bad magic throws") {
    Bytes bad = enc;
    bad[0] = 'X';
    wire::FrameReader reader;
    reader.feed(bad.data(), bad.size());
    wire::Frame out;
    CHECK_THROWS_AS(reader.next(out), wire::MalformedFrame);
  }

  SUBCASE("unknown version throws") {
    Bytes bad = enc;
    bad[4] = 0x02;
    wire::FrameReader reader;
    reader.feed(bad.data(), bad.size());
    wire::Frame out;
    CHECK_THROWS_AS(reader.next(out), wire::UnsupportedVersion);
  }

  SUBCASE("oversized payload length rejected") {
    Bytes bad = enc;
    bad[9] = 0xFF;  // payload_len high byte -> > kMaxPayload
    wire::FrameReader reader;
    reader.feed(bad.data(), bad.size());
    wire::Frame out;
    CHECK_THROWS_AS(reader.next(out), wire::MalformedFrame);
  }
}
