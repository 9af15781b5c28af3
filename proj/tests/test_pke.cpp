#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "sck/pke.hpp"

namespace {

using namespace sck;

Seed seed_from(uint64_t x) {
  Seed s{};
  std::mt19937_64 rng(x);
  for (auto& b : s) b = static_cast<uint8_t>(rng());
  return s;
}

BitVec random_bits(size_t n, std::mt19937_64& rng) {
  BitVec m(n);
  for (auto& b : m) b = static_cast<uint8_t>(rng() & 1);
  return m;
}

TEST_CASE("original variant round trip", "[pke]") {
  std::mt19937_64 rng(101);
  for (const char* name : {"KYBER512", "KYBER768", "KYBER1024"}) {
    const ParamSet& ps = param_set(name);
    KeyPair kp = keygen(ps, seed_from(rng()));
    ExpandedKey ek = expand_key(kp.pk, ps);
    for (int trial = 0; trial < 20; ++trial) {
      BitVec m = random_bits(static_cast<size_t>(ps.n), rng);
      Ciphertext ct = encrypt_original(ek, m, seed_from(rng()), ps);
      CHECK(decrypt_original(kp.sk, ct, ps) == m);
    }
  }
}

TEST_CASE("lloyd-max variant round trip", "[pke]") {
  std::mt19937_64 rng(102);
  for (const char* name : {"KYBER512-LM", "KYBER768-LM", "KYBER1024-LM"}) {
    const ParamSet& ps = param_set(name);
    const IntQuantizer& qu = lm_quantizer(ps.d_u);
    const IntQuantizer& qv = lm_quantizer(ps.d_v);
    KeyPair kp = keygen(ps, seed_from(rng()));
    ExpandedKey ek = expand_key(kp.pk, ps);
    for (int trial = 0; trial < 20; ++trial) {
      BitVec m = random_bits(static_cast<size_t>(ps.n), rng);
      Ciphertext ct = encrypt_lm(ek, m, seed_from(rng()), ps, qu, qv);
      CHECK(decrypt_lm(kp.sk, ct, ps, qu, qv) == m);
    }
  }
}

TEST_CASE("semi-compressed variant round trip", "[pke]") {
  std::mt19937_64 rng(103);
  for (const char* name : {"SC-KYBER1024-B-BCH-638", "SC-KYBER1024-B-BCH-513"}) {
    const ParamSet& ps = param_set(name);
    BchCode code = make_bch(*ps.code);
    const IntQuantizer& qu = lm_quantizer(ps.d_u);
    KeyPair kp = keygen(ps, seed_from(rng()));
    ExpandedKey ek = expand_key(kp.pk, ps);
    for (int trial = 0; trial < 10; ++trial) {
      BitVec m = random_bits(static_cast<size_t>(ps.code->k_bits), rng);
      Ciphertext ct = encrypt_sc(ek, m, seed_from(rng()), ps, code, qu);
      auto dec = decrypt_sc(kp.sk, ct, ps, code, qu);
      REQUIRE(dec.has_value());
      CHECK(*dec == m);
    }
  }
}

TEST_CASE("dot_scaled matches an exact integer convolution oracle", "[pke]") {
  // (2 s^T u) mod 2q computed by schoolbook negacyclic convolution over
  // the integers, with the secret in centered form
  std::mt19937_64 rng(104);
  for (int trial = 0; trial < 8; ++trial) {
    const size_t k = 2 + trial % 3;
    PolyVec s(k);
    std::vector<std::array<int32_t, kN>> twice_u(k);
    std::uniform_int_distribution<int32_t> lev(0, 2 * kQ - 1);
    for (size_t l = 0; l < k; ++l) {
      s[l] = cbd(seed_from(rng()), 0, 2);
      for (int j = 0; j < kN; ++j) twice_u[l][j] = lev(rng);
    }

    auto got = detail::dot_scaled(s, twice_u);

    std::vector<int64_t> acc(kN, 0);
    for (size_t l = 0; l < k; ++l)
      for (int a = 0; a < kN; ++a) {
        int64_t sc = centered(s[l].c[a]);
        if (sc == 0) continue;
        for (int b = 0; b < kN; ++b) {
          int idx = a + b;
          int64_t term = sc * twice_u[l][b];
          if (idx >= kN) {
            idx -= kN;
            term = -term;
          }
          acc[static_cast<size_t>(idx)] += term;
        }
      }
    for (int j = 0; j < kN; ++j) {
      int64_t v = acc[static_cast<size_t>(j)] % (2 * kQ);
      if (v < 0) v += 2 * kQ;
      CHECK(got[static_cast<size_t>(j)] == static_cast<int32_t>(v));
    }
  }
}

TEST_CASE("key and ciphertext byte formats round trip", "[pke]") {
  std::mt19937_64 rng(105);
  for (const char* name :
       {"KYBER512", "KYBER768-LM", "SC-KYBER1024-B-BCH-638", "WEAK-SC"}) {
    const ParamSet& ps = param_set(name);
    KeyPair kp = keygen(ps, seed_from(rng()));

    auto pk_bytes = serialize_pk(kp.pk, ps);
    CHECK(pk_bytes.size() == static_cast<size_t>(ps.k) * 384 + 32);
    PublicKey pk2 = deserialize_pk(pk_bytes, ps);
    CHECK(pk2.rho == kp.pk.rho);
    for (int i = 0; i < ps.k; ++i) CHECK(pk2.t[i].c == kp.pk.t[i].c);

    auto sk_bytes = serialize_sk(kp.sk, ps);
    CHECK(sk_bytes.size() == static_cast<size_t>(ps.k) * 384);
    SecretKey sk2 = deserialize_sk(sk_bytes, ps);
    for (int i = 0; i < ps.k; ++i) CHECK(sk2.s[i].c == kp.sk.s[i].c);

    ExpandedKey ek = expand_key(kp.pk, ps);
    Ciphertext ct;
    if (ps.variant == Variant::kOriginal) {
      ct = encrypt_original(ek, random_bits(static_cast<size_t>(ps.n), rng),
                            seed_from(rng()), ps);
    } else if (ps.variant == Variant::kLloydMax) {
      ct = encrypt_lm(ek, random_bits(static_cast<size_t>(ps.n), rng),
                      seed_from(rng()), ps, lm_quantizer(ps.d_u),
                      lm_quantizer(ps.d_v));
    } else {
      BchCode code = make_bch(*ps.code);
      ct = encrypt_sc(ek, random_bits(static_cast<size_t>(ps.code->k_bits), rng),
                      seed_from(rng()), ps, code, lm_quantizer(ps.d_u));
    }
    auto ct_bytes = serialize_ct(ct, ps);
    int dv = ps.variant == Variant::kSemiCompressed ? 12 : ps.d_v;
    size_t ct_bits = static_cast<size_t>(ps.k * ps.n * ps.d_u + ps.n * dv);
    CHECK(ct_bytes.size() == (ct_bits + 7) / 8);
    Ciphertext ct2 = deserialize_ct(ct_bytes, ps);
    CHECK(ct2.variant == ct.variant);
    CHECK(ct2.u_indices == ct.u_indices);
    CHECK(ct2.v_part == ct.v_part);
  }
}

TEST_CASE("deserialization rejects malformed bytes", "[pke]") {
  std::mt19937_64 rng(106);
  const ParamSet& ps = param_set("SC-KYBER1024-B-BCH-638");
  KeyPair kp = keygen(ps, seed_from(rng()));
  ExpandedKey ek = expand_key(kp.pk, ps);
  BchCode code = make_bch(*ps.code);
  Ciphertext ct = encrypt_sc(ek, random_bits(638, rng), seed_from(rng()), ps,
                             code, lm_quantizer(ps.d_u));

  auto pk_bytes = serialize_pk(kp.pk, ps);
  pk_bytes.pop_back();
  CHECK_THROWS(deserialize_pk(pk_bytes, ps));

  auto sk_bytes = serialize_sk(kp.sk, ps);
  sk_bytes.push_back(0);
  CHECK_THROWS(deserialize_sk(sk_bytes, ps));

  auto ct_bytes = serialize_ct(ct, ps);
  CHECK_THROWS(deserialize_ct({ct_bytes.data(), ct_bytes.size() - 1}, ps));

  // a raw v coefficient outside [0, q) must be rejected: overwrite the
  // final 12-bit field with 4095
  Ciphertext bad = ct;
  bad.v_part.back() = 4095;
  auto bad_bytes = serialize_ct(bad, ps);
  CHECK_THROWS(deserialize_ct(bad_bytes, ps));
}

TEST_CASE("variant mismatch is an error, not a wrong answer", "[pke]") {
  std::mt19937_64 rng(107);
  const ParamSet& ps = param_set("KYBER512");
  KeyPair kp = keygen(ps, seed_from(rng()));
  ExpandedKey ek = expand_key(kp.pk, ps);
  Ciphertext ct = encrypt_original(ek, random_bits(256, rng), seed_from(rng()), ps);
  const ParamSet& lm = param_set("KYBER512-LM");
  CHECK_THROWS(decrypt_lm(kp.sk, ct, lm, lm_quantizer(lm.d_u), lm_quantizer(lm.d_v)));
  CHECK_THROWS(encrypt_lm(ek, random_bits(256, rng), seed_from(rng()), ps,
                          lm_quantizer(10), lm_quantizer(4)));
}

TEST_CASE("bit/byte message helpers", "[pke]") {
  std::vector<uint8_t> bytes{0xb5, 0x01};
  BitVec bits = bits_from_bytes(bytes, 9);
  BitVec expect{1, 0, 1, 0, 1, 1, 0, 1, 1};  // lsb-first
  CHECK(bits == expect);
  CHECK(bytes_from_bits(bits) == bytes);
  // padding bits beyond nbits must be zero
  CHECK_THROWS(bits_from_bytes(bytes, 8));
}

TEST_CASE("keygen is deterministic in the seed", "[pke]") {
  const ParamSet& ps = param_set("KYBER768");
  Seed sd = seed_from(1);
  KeyPair a = keygen(ps, sd), b = keygen(ps, sd);
  CHECK(serialize_pk(a.pk, ps) == serialize_pk(b.pk, ps));
  CHECK(serialize_sk(a.sk, ps) == serialize_sk(b.sk, ps));
  KeyPair c = keygen(ps, seed_from(2));
  CHECK(serialize_pk(a.pk, ps) != serialize_pk(c.pk, ps));
}

}  // namespace
