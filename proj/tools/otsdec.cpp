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

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "otsdec/bench.hpp"
#include "otsdec/estimator.hpp"
#include "otsdec/service.hpp"

using namespace otsdec;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitContract = 2;
constexpr int kExitIo = 3;

u64 resolve_seed(std::optional<u64> flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("OTSDEC_SEED"))
    return std::strtoull(env, nullptr, 10);
  return 0xce7ab1e5;
}

RingContextPtr ring_for(unsigned log2_d, unsigned logq, unsigned limbs,
                        const std::string& descriptor = {}) {
  if (!descriptor.empty()) return RingContext::from_descriptor(descriptor);
  return RingContext::make(
      1u << log2_d, RingContext::find_ntt_moduli(1u << log2_d, logq, limbs));
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::ios_base::failure("cannot open " + path);
  out << text;
  if (!out.good()) throw std::ios_base::failure("write failed: " + path);
}

void write_bytes(const std::string& path, const wire::Bytes& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::ios_base::failure("cannot open " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out.good()) throw std::ios_base::failure("write failed: " + path);
}

struct KeyMaterial {
  HeParams he;
  KeyPair kp;
};

KeyMaterial make_keys(unsigned log2_d, unsigned logq, unsigned limbs,
                      u64 seed, const std::string& descriptor = {}) {
  KeyMaterial km{make_he_params(ring_for(log2_d, logq, limbs, descriptor)), {}};
  Rng rng(seed);
  km.kp = keygen(km.he, rng);
  return km;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"outsourced decryption for RLWE homomorphic encryption"};
  app.require_subcommand(1);
  // free the -h short name so `estimate --h` can exist
  app.set_help_flag("--help", "print help");

  std::optional<u64> seed_flag;
  app.add_option("--seed", seed_flag, "deterministic seed (or OTSDEC_SEED)");
  std::string ring_desc;
  app.add_option("--params", ring_desc,
                 "ring descriptor \"d=<u32> moduli=<q0>,<q1>,...\" "
                 "(overrides --d/--logq/--limbs)");

  auto* cmd_params =
      app.add_subcommand("params", "search (h, log q) for a security target");
  unsigned p_lambda = 128, p_logd = 13;
  cmd_params->add_option("--lambda", p_lambda, "security bits (128/192/256)");
  cmd_params->add_option("--d", p_logd, "log2 of the ring degree (13..16)");

  auto* cmd_est = app.add_subcommand("estimate", "attack-cost report");
  unsigned e_logd = 13, e_logq = 23, e_h = 17;
  bool e_csv = false;
  std::optional<unsigned> e_lambda;
  cmd_est->add_option("--d", e_logd, "log2 of the ring degree")->required();
  cmd_est->add_option("--logq", e_logq, "log2 of the modulus")->required();
  cmd_est->add_option("--h", e_h, "unblinding-factor weight")->required();
  cmd_est->add_option("--lambda", e_lambda, "feasibility target");
  cmd_est->add_flag("--csv", e_csv, "emit one CSV row instead of text");

  auto* cmd_zf =
      app.add_subcommand("zf-curve", "zero-forced cost as a weight sweep");
  unsigned z_d = 8192, z_logq = 23;
  std::string z_range = "2..30";
  std::string z_out;
  cmd_zf->add_option("--d", z_d, "ring degree")->required();
  cmd_zf->add_option("--logq", z_logq, "log2 of the modulus")->required();
  cmd_zf->add_option("--h-range", z_range, "weight range a..b");
  cmd_zf->add_option("--csv", z_out, "output path (default stdout)");

  auto* cmd_keygen = app.add_subcommand("keygen", "generate an HE key pair");
  unsigned k_logd = 12, k_logq = 60, k_limbs = 2;
  std::string k_prefix = "otsdec";
  cmd_keygen->add_option("--d", k_logd, "log2 of the ring degree");
  cmd_keygen->add_option("--logq", k_logq, "bits per modulus limb");
  cmd_keygen->add_option("--limbs", k_limbs, "number of RNS limbs");
  cmd_keygen->add_option("--out", k_prefix, "output file prefix");

  auto* cmd_bk = app.add_subcommand(
      "blind-key", "generate a blinding key and the blinded secret key");
  unsigned b_logd = 12, b_logq = 60, b_limbs = 2, b_lambda = 128;
  std::string b_prefix = "otsdec";
  cmd_bk->add_option("--d", b_logd, "log2 of the ring degree");
  cmd_bk->add_option("--logq", b_logq, "bits per modulus limb");
  cmd_bk->add_option("--limbs", b_limbs, "number of RNS limbs");
  cmd_bk->add_option("--lambda", b_lambda, "security target");
  cmd_bk->add_option("--out", b_prefix, "output file prefix");

  auto* cmd_enc = app.add_subcommand("encrypt", "encrypt random plaintexts");
  unsigned en_logd = 12, en_logq = 60, en_limbs = 2, en_count = 1;
  std::string en_prefix = "otsdec";
  cmd_enc->add_option("--d", en_logd, "log2 of the ring degree");
  cmd_enc->add_option("--logq", en_logq, "bits per modulus limb");
  cmd_enc->add_option("--limbs", en_limbs, "number of RNS limbs");
  cmd_enc->add_option("--count", en_count, "number of ciphertexts");
  cmd_enc->add_option("--out", en_prefix, "output file prefix");

  auto* cmd_dec = app.add_subcommand("decrypt", "baseline decryption demo");
  auto* cmd_ldec =
      app.add_subcommand("local-dec", "blind + local decryption demo");
  unsigned d_logd = 12, d_logq = 60, d_limbs = 2;
  for (auto* c : {cmd_dec, cmd_ldec}) {
    c->add_option("--d", d_logd, "log2 of the ring degree");
    c->add_option("--logq", d_logq, "bits per modulus limb");
    c->add_option("--limbs", d_limbs, "number of RNS limbs");
  }

  auto* cmd_serve = app.add_subcommand("serve", "run the cloud server");
  std::string s_bind = "127.0.0.1";
  unsigned s_port = wire::kDefaultPort;
  cmd_serve->add_option("--bind", s_bind, "bind address");
  cmd_serve->add_option("--port", s_port, "TCP port");

  auto* cmd_client =
      app.add_subcommand("client", "run the full two-phase demo");
  std::string c_connect = "127.0.0.1";
  unsigned c_port = wire::kDefaultPort;
  unsigned c_logd = 12, c_logq = 60, c_limbs = 2, c_count = 4;
  cmd_client->add_option("--connect", c_connect, "server address");
  cmd_client->add_option("--port", c_port, "TCP port");
  cmd_client->add_option("--d", c_logd, "log2 of the ring degree");
  cmd_client->add_option("--logq", c_logq, "bits per modulus limb");
  cmd_client->add_option("--limbs", c_limbs, "number of RNS limbs");
  cmd_client->add_option("--count", c_count, "ciphertexts to round-trip");

  auto* cmd_bench = app.add_subcommand(
      "bench", "timing comparison of the two decryption paths");
  unsigned bn_lambda = 128, bn_logd = 15, bn_iters = 1000, bn_limbs = 1;
  std::optional<unsigned> bn_logq;
  std::string bn_csv;
  cmd_bench->add_option("--lambda", bn_lambda, "security target");
  cmd_bench->add_option("--d", bn_logd, "log2 of the ring degree");
  cmd_bench->add_option("--iters", bn_iters, "iterations per path");
  cmd_bench->add_option("--limbs", bn_limbs, "number of RNS limbs");
  cmd_bench->add_option("--logq", bn_logq, "bits per limb (default: table)");
  cmd_bench->add_option("--csv", bn_csv, "append a CSV row to this path");

  auto* cmd_space = app.add_subcommand("space", "storage accounting");
  unsigned sp_logd = 15, sp_limbs = 1, sp_logq = 22, sp_h1 = 6, sp_h2 = 3;
  std::string sp_csv;
  cmd_space->add_option("--d", sp_logd, "log2 of the ring degree");
  cmd_space->add_option("--logq", sp_logq, "bits per modulus limb");
  cmd_space->add_option("--limbs", sp_limbs, "number of RNS limbs");
  cmd_space->add_option("--h1", sp_h1, "first factor weight");
  cmd_space->add_option("--h2", sp_h2, "second factor weight");
  cmd_space->add_option("--csv", sp_csv, "write CSV rows to this path");

  for (auto* sc : {cmd_params, cmd_est, cmd_zf, cmd_keygen, cmd_bk, cmd_enc,
                   cmd_dec, cmd_ldec, cmd_serve, cmd_client, cmd_bench,
                   cmd_space})
    sc->fallthrough();  // let --seed live on the parent

  CLI11_PARSE(app, argc, argv);
  const u64 seed = resolve_seed(seed_flag);

  try {
    if (cmd_params->parsed()) {
      auto p = find_params(p_lambda, p_logd);
      std::cout << "h=" << p.h << " logq=" << p.log_q << "\n";
      std::cout << "h1=" << p.h1 << " h2=" << p.h2 << " q2=" << p.q2 << "\n";
      std::cout << p.report.to_text();
      return kExitOk;
    }

    if (cmd_est->parsed()) {
      std::uint32_t h2 = min_h2_for_weight(6, e_h);
      auto rep = estimate_attacks(1u << e_logd, e_logq, e_h, 6, h2, 2);
      if (e_csv) {
        std::cout << "d,logq,h,brute,mitm,enum,zf_bits,r,beta,feasible\n"
                  << rep.to_csv_row() << "\n";
      } else {
        std::cout << rep.to_text();
        if (e_lambda)
          std::cout << "feasible at " << *e_lambda << " bits: "
                    << (rep.feasible(*e_lambda) ? "yes" : "no") << "\n";
      }
      return kExitOk;
    }

    if (cmd_zf->parsed()) {
      auto dots = z_range.find("..");
      if (dots == std::string::npos)
        throw ContractError("h-range must look like a..b");
      unsigned lo = std::stoul(z_range.substr(0, dots));
      unsigned hi = std::stoul(z_range.substr(dots + 2));
      if (lo < 1 || hi < lo) throw ContractError("bad h-range");
      std::ostringstream os;
      os << "h,zf_bits\n";
      for (unsigned h = lo; h <= hi; ++h)
        os << h << ',' << zf_attack_bits(z_d, std::exp2(z_logq), h).bits
           << "\n";
      if (z_out.empty()) {
        std::cout << os.str();
      } else {
        write_text(z_out, os.str());
      }
      return kExitOk;
    }

    if (cmd_keygen->parsed()) {
      auto km = make_keys(k_logd, k_logq, k_limbs, seed, ring_desc);
      write_text(k_prefix + ".ring", km.he.ring->descriptor());
      write_bytes(k_prefix + ".sk", wire::encode_poly(km.kp.sk.s));
      wire::Bytes pk;
      wire::encode_poly(pk, km.kp.pk.a_ntt);
      wire::encode_poly(pk, km.kp.pk.b_ntt);
      write_bytes(k_prefix + ".pk", pk);
      std::cout << "ring: " << km.he.ring->descriptor() << "\n"
                << "plain modulus: " << km.he.plain_modulus << "\n"
                << "wrote " << k_prefix << ".ring/.sk/.pk\n";
      return kExitOk;
    }

    if (cmd_bk->parsed()) {
      auto km = make_keys(b_logd, b_logq, b_limbs, seed, ring_desc);
      auto proto = setup(km.he.ring, b_lambda);
      Rng rng(seed + 1);
      auto pair = make_blinding_key(proto, rng);
      auto blinded = blind_secret_key(km.kp.sk, pair);
      wire::Bytes factors;
      for (const auto& f : pair.factors) wire::encode_sparse(factors, f);
      write_bytes(b_prefix + ".factors", factors);
      write_bytes(b_prefix + ".blinded", wire::encode_poly(blinded.s_ntt));
      std::cout << "h=" << proto.h << " h1=" << proto.h1 << " h2=" << proto.h2
                << " q2=" << proto.q2 << "\n"
                << "wrote " << b_prefix << ".factors/.blinded\n";
      return kExitOk;
    }

    if (cmd_enc->parsed()) {
      auto km = make_keys(en_logd, en_logq, en_limbs, seed, ring_desc);
      Rng rng(seed + 2);
      wire::Bytes blob;
      for (unsigned i = 0; i < en_count; ++i) {
        Plaintext m = random_plaintext(km.he, rng);
        wire::encode_ct(blob, encrypt(km.he, km.kp.pk, m, rng));
      }
      write_bytes(en_prefix + ".ct", blob);
      std::cout << "wrote " << en_count << " ciphertexts to " << en_prefix
                << ".ct\n";
      return kExitOk;
    }

    if (cmd_dec->parsed() || cmd_ldec->parsed()) {
      auto km = make_keys(d_logd, d_logq, d_limbs, seed, ring_desc);
      Rng rng(seed + 2);
      Plaintext m = random_plaintext(km.he, rng);
      Ciphertext ct = encrypt(km.he, km.kp.pk, m, rng);
      Plaintext out;
      if (cmd_dec->parsed()) {
        out = decrypt(km.he, km.kp.sk, ct);
      } else {
        auto proto = setup(km.he.ring, 128);
        Rng rng2(seed + 3);
        auto pair = make_blinding_key(proto, rng2);
        auto blinded = blind_secret_key(km.kp.sk, pair);
        out = local_decrypt(km.he, pair, blind_decrypt(blinded, ct));
      }
      std::cout << (out == m ? "round trip ok" : "ROUND TRIP FAILED") << "\n";
      return out == m ? kExitOk : kExitContract;
    }

    if (cmd_serve->parsed()) {
      CloudServer server;
      std::uint16_t port =
          server.start(s_bind, static_cast<std::uint16_t>(s_port));
      std::cout << "listening on " << s_bind << ":" << port << "\n"
                << "press enter to stop\n";
      std::cin.get();
      server.stop();
      return kExitOk;
    }

    if (cmd_client->parsed()) {
      auto km = make_keys(c_logd, c_logq, c_limbs, seed, ring_desc);
      auto proto = setup(km.he.ring, 128);
      Rng rng(seed + 1);
      auto pair = make_blinding_key(proto, rng);
      auto blinded = blind_secret_key(km.kp.sk, pair);

      ClientSession session(c_connect, static_cast<std::uint16_t>(c_port));
      session.setup(blinded);
      std::vector<Plaintext> msgs;
      std::vector<std::uint32_t> ids;
      for (unsigned i = 0; i < c_count; ++i) {
        msgs.push_back(random_plaintext(km.he, rng));
        ids.push_back(
            session.store_ct(encrypt(km.he, km.kp.pk, msgs.back(), rng)));
      }
      std::uint32_t sum_id = ids.size() > 1 ? session.eval_add(ids[0], ids[1])
                                            : ids[0];
      ids.push_back(sum_id);
      auto results = session.blind_dec(ids);
      unsigned ok = 0;
      for (std::size_t i = 0; i < c_count; ++i)
        if (local_decrypt(km.he, pair, results[i]) == msgs[i]) ++ok;
      bool sum_ok = true;
      if (c_count > 1) {
        Plaintext sum = local_decrypt(km.he, pair, results.back());
        for (std::uint32_t j = 0; j < km.he.ctx().degree(); ++j)
          sum_ok &= sum.values[j] == (msgs[0].values[j] + msgs[1].values[j]) %
                                         km.he.plain_modulus;
      }
      std::cout << ok << "/" << c_count << " plaintexts recovered, "
                << "homomorphic sum " << (sum_ok ? "ok" : "WRONG") << "\n";
      return (ok == c_count && sum_ok) ? kExitOk : kExitContract;
    }

    if (cmd_bench->parsed()) {
      unsigned logq = bn_logq.value_or(find_params(bn_lambda, bn_logd).log_q);
      auto ring = ring_for(bn_logd, logq, bn_limbs);
      auto he = make_he_params(ring);
      auto proto = setup(ring, bn_lambda);
      auto rep = bench_decrypt(he, bn_lambda, proto.h, proto.h1, proto.h2,
                               bn_iters, seed);
      std::cout << rep.to_text();
      if (!bn_csv.empty()) {
        std::ofstream out(bn_csv, std::ios::app);
        if (!out) throw std::ios_base::failure("cannot open " + bn_csv);
        if (out.tellp() == 0) out << BenchReport::csv_header() << "\n";
        out << rep.to_csv_row() << "\n";
        if (!out.good()) throw std::ios_base::failure("write failed");
      }
      return kExitOk;
    }

    if (cmd_space->parsed()) {
      auto ring = ring_for(sp_logd, sp_logq, sp_limbs);
      auto he = make_he_params(ring);
      auto rep = space_report(he, sp_h1, sp_h2, seed);
      std::cout << rep.to_text();
      if (!sp_csv.empty())
        write_text(sp_csv,
                   SpaceReport::csv_header() + "\n" + rep.to_csv_rows());
      return kExitOk;
    }
  } catch (const std::ios_base::failure& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const TransportError& e) {
    std::cerr << "transport error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitContract;
  }
  return kExitOk;
}
