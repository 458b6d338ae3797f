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

#include "otsdec/service.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

namespace otsdec {

using wire::Bytes;
using wire::Frame;

// ---------------------------------------------------------------------------
// ServerSession
// ---------------------------------------------------------------------------

void ServerSession::reply_ok(Bytes& out, const Bytes& payload) {
  Frame f{wire::kOk, payload};
  Bytes enc = wire::encode_frame(f);
  out.insert(out.end(), enc.begin(), enc.end());
}

void ServerSession::reply_err(Bytes& out, std::uint8_t code,
                              const std::string& text) {
  Frame f{wire::kErr, wire::make_err_payload(code, text)};
  Bytes enc = wire::encode_frame(f);
  out.insert(out.end(), enc.begin(), enc.end());
}

bool ServerSession::consume(const std::uint8_t* data, std::size_t len,
                            Bytes& out) {
  try {
    reader_.feed(data, len);
    Frame f;
    while (reader_.next(f)) {
      if (!handle(f, out)) return false;
    }
    return true;
  } catch (const wire::MalformedFrame& e) {
    reply_err(out, wire::kErrMalformed, e.what());
    return false;
  }
}

bool ServerSession::handle(const Frame& f, Bytes& out) {
  try {
    switch (f.msg_type) {
      case wire::kSetup: {
        wire::Reader r(f.payload);
        std::uint32_t dlen = r.u32();
        if (dlen > f.payload.size()) throw wire::MalformedFrame("bad length");
        std::string desc(dlen, '\0');
        r.bytes(reinterpret_cast<std::uint8_t*>(desc.data()), dlen);
        RingContextPtr ring;
        try {
          ring = RingContext::from_descriptor(desc);
        } catch (const std::exception& e) {
          throw wire::MalformedFrame(e.what());
        }
        if (!ring->ntt_ready())
          throw wire::MalformedFrame("ring does not support evaluation form");
        RnsPoly s = wire::decode_poly(r, ring);
        r.expect_end();
        if (s.domain() != Domain::kNtt)
          throw wire::MalformedFrame("blinded key must be in NTT domain");
        key_.s_ntt = std::move(s);
        key_.s_ntt_shoup.resize(std::size_t{ring->degree()} *
                                ring->limb_count());
        for (std::size_t i = 0; i < ring->limb_count(); ++i) {
          const u64 q = ring->limb(i).q;
          auto lb = key_.s_ntt.limb(i);
          for (std::uint32_t j = 0; j < ring->degree(); ++j)
            key_.s_ntt_shoup[i * ring->degree() + j] =
                shoup_precompute(lb[j], q);
        }
        ring_ = std::move(ring);
        store_.clear();
        state_ = State::kReady;
        reply_ok(out, {});
        return true;
      }
      case wire::kStoreCt: {
        if (state_ != State::kReady) {
          reply_err(out, wire::kErrProtocolOrder, "SETUP required first");
          return true;
        }
        wire::Reader r(f.payload);
        Ciphertext ct = wire::decode_ct(r, ring_);
        r.expect_end();
        store_.push_back(std::move(ct));
        Bytes payload;
        wire::put_u32(payload, static_cast<std::uint32_t>(store_.size() - 1));
        reply_ok(out, payload);
        return true;
      }
      case wire::kEvalAdd: {
        if (state_ != State::kReady) {
          reply_err(out, wire::kErrProtocolOrder, "SETUP required first");
          return true;
        }
        wire::Reader r(f.payload);
        std::uint32_t a = r.u32();
        std::uint32_t b = r.u32();
        r.expect_end();
        if (a >= store_.size() || b >= store_.size()) {
          reply_err(out, wire::kErrUnknownId, "unknown ciphertext id");
          return true;
        }
        store_.push_back(eval_add(store_[a], store_[b]));
        Bytes payload;
        wire::put_u32(payload, static_cast<std::uint32_t>(store_.size() - 1));
        reply_ok(out, payload);
        return true;
      }
      case wire::kBlindDec: {
        if (state_ != State::kReady) {
          reply_err(out, wire::kErrProtocolOrder, "SETUP required first");
          return true;
        }
        wire::Reader r(f.payload);
        std::uint32_t count = r.u32();
        if (count > store_.size() * 2 + 16)
          throw wire::MalformedFrame("id list too long");
        std::vector<std::uint32_t> ids(count);
        for (auto& id : ids) id = r.u32();
        r.expect_end();
        for (auto id : ids) {
          if (id >= store_.size()) {
            reply_err(out, wire::kErrUnknownId, "unknown ciphertext id");
            return true;
          }
        }
        Bytes payload;
        wire::put_u32(payload, count);
        for (auto id : ids) {
          BlindedCiphertext bct = blind_decrypt(key_, store_[id]);
          if (opts_.tamper) opts_.tamper(bct);
          wire::encode_blinded_ct(payload, bct);
        }
        reply_ok(out, payload);
        return true;
      }
      default:
        throw wire::MalformedFrame("unexpected message type");
    }
  } catch (const wire::MalformedFrame& e) {
    reply_err(out, wire::kErrMalformed, e.what());
    return false;
  }
}

// ---------------------------------------------------------------------------
// Sockets
// ---------------------------------------------------------------------------

namespace {

bool send_all(int fd, const std::uint8_t* data, std::size_t len) {
  std::size_t sent = 0;
  while (sent < len) {
    ssize_t n = ::send(fd, data + sent, len - sent, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    sent += static_cast<std::size_t>(n);
  }
  return true;
}

int connect_once(const std::string& host, std::uint16_t port) {
  int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) return -1;
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    ::close(fd);
    return -1;
  }
  if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
    ::close(fd);
    return -1;
  }
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  return fd;
}

}  // namespace

CloudServer::CloudServer(ServerSession::Options opts)
    : opts_(std::move(opts)) {}

CloudServer::~CloudServer() { stop(); }

std::uint16_t CloudServer::start(const std::string& bind_addr,
                                 std::uint16_t port) {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw TransportError("socket() failed");
  int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, bind_addr.c_str(), &addr.sin_addr) != 1)
    throw TransportError("bad bind address");
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0)
    throw TransportError(std::string("bind failed: ") + std::strerror(errno));
  if (::listen(listen_fd_, 16) != 0)
    throw TransportError("listen failed");
  socklen_t alen = sizeof addr;
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &alen);
  running_ = true;
  accept_thread_ = std::thread([this] { accept_loop(); });
  return ntohs(addr.sin_port);
}

void CloudServer::stop() {
  if (!running_.exchange(false)) return;
  if (accept_thread_.joinable()) accept_thread_.join();
  ::close(listen_fd_);
  std::lock_guard<std::mutex> lk(mu_);
  for (auto& t : workers_)
    if (t.joinable()) t.join();
  workers_.clear();
}

void CloudServer::accept_loop() {
  while (running_) {
    pollfd pfd{listen_fd_, POLLIN, 0};
    int ready = ::poll(&pfd, 1, 100);
    if (ready < 0 && errno != EINTR) break;
    if (ready <= 0) continue;
    int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) {
      if (errno == EINTR || errno == ECONNABORTED) continue;
      break;
    }
    std::lock_guard<std::mutex> lk(mu_);
    workers_.emplace_back([this, fd] { serve_connection(fd); });
  }
}

void CloudServer::serve_connection(int fd) {
  ServerSession session(opts_);
  std::uint8_t buf[16384];
  Bytes out;
  while (running_) {
    pollfd pfd{fd, POLLIN, 0};
    int ready = ::poll(&pfd, 1, 100);
    if (ready < 0 && errno != EINTR) break;
    if (ready <= 0) continue;
    ssize_t n = ::recv(fd, buf, sizeof buf, 0);
    if (n <= 0) {
      if (n < 0 && errno == EINTR) continue;
      break;
    }
    out.clear();
    bool keep = session.consume(buf, static_cast<std::size_t>(n), out);
    if (!out.empty() && !send_all(fd, out.data(), out.size())) break;
    if (!keep) break;
  }
  ::close(fd);
}

// ---------------------------------------------------------------------------
// ClientSession
// ---------------------------------------------------------------------------

ClientSession::ClientSession(const std::string& host, std::uint16_t port,
                             Options opts)
    : opts_(std::move(opts)) {
  fd_ = connect_once(host, port);
  if (fd_ < 0) fd_ = connect_once(host, port);  // one retry, then report
  if (fd_ < 0) throw TransportError("unable to connect to " + host);
}

ClientSession::~ClientSession() {
  if (fd_ >= 0) ::close(fd_);
}

Bytes ClientSession::request(std::uint8_t msg_type, Bytes payload) {
  Frame f{msg_type, std::move(payload)};
  Bytes enc = wire::encode_frame(f);
  if (opts_.outbound_tap) opts_.outbound_tap(enc);
  if (!send_all(fd_, enc.data(), enc.size()))
    throw TransportError("send failed");
  std::uint8_t buf[16384];
  Frame resp;
  for (;;) {
    if (reader_.next(resp)) break;
    ssize_t n = ::recv(fd_, buf, sizeof buf, 0);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) throw TransportError("connection closed by server");
    reader_.feed(buf, static_cast<std::size_t>(n));
  }
  if (resp.msg_type == wire::kErr) {
    wire::Reader r(resp.payload);
    std::uint8_t code = r.u8();
    std::uint32_t len = r.u32();
    std::string text(len, '\0');
    r.bytes(reinterpret_cast<std::uint8_t*>(text.data()), len);
    throw ServerError(code, text);
  }
  if (resp.msg_type != wire::kOk)
    throw TransportError("unexpected response type");
  return resp.payload;
}

void ClientSession::setup(const BlindedSecretKey& key) {
  ring_ = key.s_ntt.ring_ptr();
  request(wire::kSetup, wire::make_setup_payload(*ring_, key.s_ntt));
}

std::uint32_t ClientSession::store_ct(const Ciphertext& ct) {
  Bytes payload;
  wire::encode_ct(payload, ct);
  Bytes resp = request(wire::kStoreCt, std::move(payload));
  wire::Reader r(resp);
  std::uint32_t id = r.u32();
  r.expect_end();
  return id;
}

std::uint32_t ClientSession::eval_add(std::uint32_t a, std::uint32_t b) {
  Bytes payload;
  wire::put_u32(payload, a);
  wire::put_u32(payload, b);
  Bytes resp = request(wire::kEvalAdd, std::move(payload));
  wire::Reader r(resp);
  std::uint32_t id = r.u32();
  r.expect_end();
  return id;
}

std::vector<BlindedCiphertext> ClientSession::blind_dec(
    const std::vector<std::uint32_t>& ids) {
  Bytes payload;
  wire::put_u32(payload, static_cast<std::uint32_t>(ids.size()));
  for (auto id : ids) wire::put_u32(payload, id);
  Bytes resp = request(wire::kBlindDec, std::move(payload));
  wire::Reader r(resp);
  std::uint32_t count = r.u32();
  if (count != ids.size()) throw TransportError("response count mismatch");
  std::vector<BlindedCiphertext> out;
  out.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i)
    out.push_back(wire::decode_blinded_ct(r, ring_));
  r.expect_end();
  return out;
}

}  // namespace otsdec
