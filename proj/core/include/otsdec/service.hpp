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

#include <atomic>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "otsdec/wire.hpp"

namespace otsdec {

/// Error frame surfaced from the server.
class ServerError : public std::runtime_error {
 public:
  ServerError(std::uint8_t code, const std::string& text)
      : std::runtime_error("server error 0x" + std::to_string(code) + ": " +
                           text),
        code(code) {}
  std::uint8_t code;
};

class TransportError : public std::runtime_error {
 public:
  explicit TransportError(const std::string& what)
      : std::runtime_error(what) {}
};

/// Cloud-side per-connection protocol state machine: AWAIT_SETUP -> READY.
/// Pure byte-in/byte-out logic; the socket pump and the wire fuzzer drive
/// the same entry point. Stored ciphertexts and the blinded key are
/// session-local, so concurrent sessions share nothing.
class ServerSession {
 public:
  struct Options {
    // Test hook: mutate each blind-decryption result before it is sent.
    std::function<void(BlindedCiphertext&)> tamper;
  };

  explicit ServerSession(Options opts = {}) : opts_(std::move(opts)) {}

  /// Feed raw bytes; complete requests are answered into `out`.
  /// Returns false when the connection must be closed (malformed input).
  bool consume(const std::uint8_t* data, std::size_t len, wire::Bytes& out);

 private:
  enum class State { kAwaitSetup, kReady };

  bool handle(const wire::Frame& f, wire::Bytes& out);
  void reply_ok(wire::Bytes& out, const wire::Bytes& payload);
  void reply_err(wire::Bytes& out, std::uint8_t code, const std::string& text);

  State state_ = State::kAwaitSetup;
  wire::FrameReader reader_;
  Options opts_;
  RingContextPtr ring_;
  BlindedSecretKey key_;
  std::vector<Ciphertext> store_;
};

/// Threaded TCP server hosting one ServerSession per connection.
class CloudServer {
 public:
  explicit CloudServer(ServerSession::Options opts = {});
  ~CloudServer();

  /// Binds and starts accepting; port 0 picks an ephemeral port. Returns
  /// the actual port.
  std::uint16_t start(const std::string& bind_addr, std::uint16_t port);
  void stop();

 private:
  void accept_loop();
  void serve_connection(int fd);

  ServerSession::Options opts_;
  int listen_fd_ = -1;
  std::atomic<bool> running_{false};
  std::thread accept_thread_;
  std::mutex mu_;
  std::vector<std::thread> workers_;
};

/// Client driver for the two protocol phases. The secret key and the
/// unblinding factors never reach this class; only the blinded key is
/// serialized (the deny-list test taps outbound frames to prove it).
class ClientSession {
 public:
  struct Options {
    std::function<void(const wire::Bytes&)> outbound_tap;
  };

  ClientSession(const std::string& host, std::uint16_t port,
                Options opts = {});
  ~ClientSession();

  ClientSession(const ClientSession&) = delete;
  ClientSession& operator=(const ClientSession&) = delete;

  /// Setup phase: ships the ring descriptor and the blinded key.
  void setup(const BlindedSecretKey& key);

  std::uint32_t store_ct(const Ciphertext& ct);
  std::uint32_t eval_add(std::uint32_t a, std::uint32_t b);
  std::vector<BlindedCiphertext> blind_dec(
      const std::vector<std::uint32_t>& ids);

 private:
  wire::Bytes request(std::uint8_t msg_type, wire::Bytes payload);

  int fd_ = -1;
  Options opts_;
  RingContextPtr ring_;
  wire::FrameReader reader_;
};

}  // namespace otsdec
