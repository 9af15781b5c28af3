/**
 * The three CPA encryption variants: original compression, Lloyd-Max
 * quantized, and semi-compressed (PAM/Gray/BCH encoded v).
 *
 * Constant-time posture: decrypt paths contain no secret-dependent
 * branches or secret-indexed table lookups (documented contract, not
 * formally verified). Ring arithmetic itself carries no constant-time
 * guarantee.
 */

#ifndef SCK_PKE_HPP
#define SCK_PKE_HPP

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <vector>

#include "sck/coding.hpp"
#include "sck/params.hpp"
#include "sck/quantization.hpp"
#include "sck/ring.hpp"
#include "sck/sampling.hpp"

namespace sck {

struct PublicKey {
  PolyVec t;
  Seed rho;
};

struct SecretKey {
  PolyVec s;
};

struct KeyPair {
  PublicKey pk;
  SecretKey sk;
};

struct Ciphertext {
  Variant variant;
  std::vector<uint32_t> u_indices;  // k*n entries, each < 2^d_u
  std::vector<uint32_t> v_part;     // n entries: d_v-bit indices or raw coeffs
};

// ---------------------------------------------------------------------------
// Lloyd-Max codebook access (memoized per d; immutable once built)

inline const IntQuantizer& lm_quantizer(int d) {
  static std::mutex mu;
  static std::map<int, IntQuantizer> cache;
  std::scoped_lock lock(mu);
  auto it = cache.find(d);
  if (it == cache.end()) {
    auto cb = lloyd_max(uniform_pmf(kQ), size_t{1} << d);
    it = cache.emplace(d, IntQuantizer(std::move(cb))).first;
  }
  return it->second;
}

// ---------------------------------------------------------------------------
// Key generation

inline KeyPair keygen(const ParamSet& ps, const Seed& seed) {
  // seed -> (rho, sigma)
  uint8_t buf[64];
  Shake256 g({seed.data(), seed.size()});
  g.squeeze(buf, sizeof buf);
  Seed rho, sigma;
  std::copy(buf, buf + 32, rho.begin());
  std::copy(buf + 32, buf + 64, sigma.begin());

  PolyMat A = expand_matrix(rho, ps.k);
  PolyVec s(ps.k), e(ps.k);
  for (int i = 0; i < ps.k; ++i) s[i] = cbd(sigma, static_cast<uint8_t>(i), ps.eta1);
  for (int i = 0; i < ps.k; ++i)
    e[i] = cbd(sigma, static_cast<uint8_t>(ps.k + i), ps.eta1);

  // t = A s + e
  PolyVec t(ps.k);
  std::vector<Poly> s_hat(ps.k);
  for (int j = 0; j < ps.k; ++j) {
    s_hat[j] = s[j];
    ntt(s_hat[j]);
  }
  for (int i = 0; i < ps.k; ++i) {
    Poly acc;
    for (int j = 0; j < ps.k; ++j) {
      Poly a = A[i][j];
      ntt(a);
      acc = poly_add(acc, ntt_pointwise(a, s_hat[j]));
    }
    inv_ntt(acc);
    t[i] = poly_add(acc, e[i]);
  }
  return {{std::move(t), rho}, {std::move(s)}};
}

/// Public key with the matrix A re-expanded once; reusable across many
/// encryptions under the same key.
struct ExpandedKey {
  PublicKey pk;
  PolyMat A;
};

inline ExpandedKey expand_key(const PublicKey& pk, const ParamSet& ps) {
  return {pk, expand_matrix(pk.rho, ps.k)};
}

namespace detail {

struct EncNoise {
  PolyVec r, e1;
  Poly e2;
};

inline EncNoise sample_enc_noise(const Seed& coins, const ParamSet& ps) {
  EncNoise n;
  n.r.resize(ps.k);
  n.e1.resize(ps.k);
  for (int i = 0; i < ps.k; ++i)
    n.r[i] = cbd(coins, static_cast<uint8_t>(i), ps.eta1);
  for (int i = 0; i < ps.k; ++i)
    n.e1[i] = cbd(coins, static_cast<uint8_t>(ps.k + i), ps.eta2);
  n.e2 = cbd(coins, static_cast<uint8_t>(2 * ps.k), ps.eta2);
  return n;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Original Kyber.CPA

inline Ciphertext encrypt_original(const ExpandedKey& ek, const BitVec& m,
                                   const Seed& coins, const ParamSet& ps) {
  if (ps.variant != Variant::kOriginal)
    throw std::domain_error("encrypt_original: wrong variant");
  if (static_cast<int>(m.size()) != ps.n)
    throw std::domain_error("encrypt_original: message must be n bits");

  auto noise = detail::sample_enc_noise(coins, ps);
  PolyVec up = matvec_t(ek.A, noise.r);
  for (int i = 0; i < ps.k; ++i) up[i] = poly_add(up[i], noise.e1[i]);
  Poly vp = poly_add(inner_product(ek.pk.t, noise.r), noise.e2);
  const uint16_t half_q = (kQ + 1) / 2;  // round(q/2), ties up
  for (int i = 0; i < ps.n; ++i)
    if (m[static_cast<size_t>(i)])
      vp.c[i] = detail::add_mod(vp.c[i], half_q);

  Ciphertext ct;
  ct.variant = Variant::kOriginal;
  ct.u_indices.reserve(static_cast<size_t>(ps.k) * ps.n);
  for (int i = 0; i < ps.k; ++i)
    for (int j = 0; j < ps.n; ++j)
      ct.u_indices.push_back(static_cast<uint32_t>(compress(up[i].c[j], ps.d_u)));
  ct.v_part.reserve(ps.n);
  for (int j = 0; j < ps.n; ++j)
    ct.v_part.push_back(static_cast<uint32_t>(compress(vp.c[j], ps.d_v)));
  return ct;
}

inline BitVec decrypt_original(const SecretKey& sk, const Ciphertext& ct,
                               const ParamSet& ps) {
  if (ct.variant != Variant::kOriginal)
    throw std::domain_error("decrypt_original: variant mismatch");
  PolyVec u(ps.k);
  for (int i = 0; i < ps.k; ++i)
    for (int j = 0; j < ps.n; ++j)
      u[i].c[j] = static_cast<uint16_t>(
          decompress(static_cast<int>(ct.u_indices[static_cast<size_t>(i) * ps.n + j]), ps.d_u));
  Poly v;
  for (int j = 0; j < ps.n; ++j)
    v.c[j] = static_cast<uint16_t>(decompress(static_cast<int>(ct.v_part[static_cast<size_t>(j)]), ps.d_v));

  Poly w = poly_sub(v, inner_product(sk.s, u));
  BitVec m(ps.n);
  for (int j = 0; j < ps.n; ++j)
    m[static_cast<size_t>(j)] = static_cast<uint8_t>(compress(w.c[j], 1));
  return m;
}

// ---------------------------------------------------------------------------
// Lloyd-Max variant
//
// Reconstruction levels have denominator 2; decryption runs in
// integers scaled by D = 2 (residues mod 2q), so v - s^T u stays exact.

namespace detail {

/// (2 * s^T u) mod 2q, where the entries of `twice_u` are 2*level in
/// [0, 2q). Splits twice_u = 2*u_int + f and combines an NTT product
/// mod q with a bit-convolution parity via CRT.
inline std::vector<int32_t> dot_scaled(const PolyVec& s,
                                       const std::vector<std::array<int32_t, kN>>& twice_u) {
  const size_t k = s.size();
  Poly acc_q;      // s^T u_int mod q
  Poly acc_f_q;    // s^T f mod q
  std::bitset<kN> acc_f_par;  // s^T f mod 2 (centered representatives)
  bool first = true;
  std::vector<Poly> terms_q, terms_f;
  for (size_t i = 0; i < k; ++i) {
    Poly u_int, f;
    std::bitset<kN> fbits;
    for (int j = 0; j < kN; ++j) {
      int32_t w = twice_u[i][j];
      u_int.c[j] = static_cast<uint16_t>((w >> 1) % kQ);
      f.c[j] = static_cast<uint16_t>(w & 1);
      fbits[static_cast<size_t>(j)] = w & 1;
    }
    Poly s_hat = s[i];
    ntt(s_hat);
    Poly a = u_int, b = f;
    ntt(a);
    ntt(b);
    Poly pa = ntt_pointwise(s_hat, a), pb = ntt_pointwise(s_hat, b);
    if (first) {
      acc_q = pa;
      acc_f_q = pb;
      first = false;
    } else {
      acc_q = poly_add(acc_q, pa);
      acc_f_q = poly_add(acc_f_q, pb);
    }
    acc_f_par ^= bit_conv_mod2(s[i], fbits);
  }
  inv_ntt(acc_q);
  inv_ntt(acc_f_q);

  std::vector<int32_t> out(kN);
  for (int j = 0; j < kN; ++j) {
    // CRT lift of s^T f to mod 2q, then add 2 * (s^T u_int mod q)
    int32_t sf = acc_f_q.c[j];
    if ((sf & 1) != static_cast<int32_t>(acc_f_par[static_cast<size_t>(j)])) sf += kQ;
    int32_t y = 2 * acc_q.c[j] + sf;
    out[j] = y % (2 * kQ);
  }
  return out;
}

}  // namespace detail

inline Ciphertext encrypt_lm(const ExpandedKey& ek, const BitVec& m,
                             const Seed& coins, const ParamSet& ps,
                             const IntQuantizer& qu, const IntQuantizer& qv) {
  if (ps.variant != Variant::kLloydMax)
    throw std::domain_error("encrypt_lm: wrong variant");
  if (static_cast<int>(m.size()) != ps.n)
    throw std::domain_error("encrypt_lm: message must be n bits");
  if (qu.size() != size_t{1} << ps.d_u || qv.size() != size_t{1} << ps.d_v)
    throw std::runtime_error("encrypt_lm: codebook sizes do not match d_u/d_v");

  auto noise = detail::sample_enc_noise(coins, ps);
  PolyVec up = matvec_t(ek.A, noise.r);
  for (int i = 0; i < ps.k; ++i) up[i] = poly_add(up[i], noise.e1[i]);
  Poly vp = poly_add(inner_product(ek.pk.t, noise.r), noise.e2);
  const uint16_t half_q = (kQ + 1) / 2;
  for (int i = 0; i < ps.n; ++i)
    if (m[static_cast<size_t>(i)])
      vp.c[i] = detail::add_mod(vp.c[i], half_q);

  Ciphertext ct;
  ct.variant = Variant::kLloydMax;
  ct.u_indices.reserve(static_cast<size_t>(ps.k) * ps.n);
  for (int i = 0; i < ps.k; ++i)
    for (int j = 0; j < ps.n; ++j)
      ct.u_indices.push_back(qu.index_of(up[i].c[j]));
  ct.v_part.reserve(ps.n);
  for (int j = 0; j < ps.n; ++j) ct.v_part.push_back(qv.index_of(vp.c[j]));
  return ct;
}

inline BitVec decrypt_lm(const SecretKey& sk, const Ciphertext& ct,
                         const ParamSet& ps, const IntQuantizer& qu,
                         const IntQuantizer& qv) {
  if (ct.variant != Variant::kLloydMax)
    throw std::domain_error("decrypt_lm: variant mismatch");

  std::vector<std::array<int32_t, kN>> twice_u(static_cast<size_t>(ps.k));
  for (int i = 0; i < ps.k; ++i)
    for (int j = 0; j < ps.n; ++j)
      twice_u[static_cast<size_t>(i)][j] =
          qu.twice_level(ct.u_indices[static_cast<size_t>(i) * ps.n + j]);
  auto stu2 = detail::dot_scaled(sk.s, twice_u);

  BitVec m(ps.n);
  for (int j = 0; j < ps.n; ++j) {
    int32_t y2 = qv.twice_level(ct.v_part[static_cast<size_t>(j)]) - stu2[j];
    y2 %= 2 * kQ;
    if (y2 < 0) y2 += 2 * kQ;
    // bit = round(y2/q) mod 2, ties up (equivalent to Compress(y2/2, 1))
    m[static_cast<size_t>(j)] = static_cast<uint8_t>(((2 * y2 + kQ) / (2 * kQ)) & 1);
  }
  return m;
}

// ---------------------------------------------------------------------------
// Semi-compressed variant

inline Ciphertext encrypt_sc(const ExpandedKey& ek, const BitVec& m,
                             const Seed& coins, const ParamSet& ps,
                             const BchCode& code, const IntQuantizer& qu) {
  if (ps.variant != Variant::kSemiCompressed)
    throw std::domain_error("encrypt_sc: wrong variant");
  if (static_cast<int>(m.size()) != ps.code->k_bits)
    throw std::domain_error("encrypt_sc: message must be K bits");
  if (qu.size() != size_t{1} << ps.d_u)
    throw std::runtime_error("encrypt_sc: codebook size does not match d_u");

  auto noise = detail::sample_enc_noise(coins, ps);
  PolyVec up = matvec_t(ek.A, noise.r);
  for (int i = 0; i < ps.k; ++i) up[i] = poly_add(up[i], noise.e1[i]);
  Poly vp = poly_add(inner_product(ek.pk.t, noise.r), noise.e2);

  SymbolWord x = enc_pipeline(m, code, ps.p);
  const uint16_t scale = static_cast<uint16_t>((2 * kQ + ps.p) / (2 * ps.p));  // round(q/p), ties up
  for (int j = 0; j < ps.n; ++j)
    vp.c[j] = detail::add_mod(vp.c[j],
                              detail::mul_mod(scale, x[static_cast<size_t>(j)]));

  Ciphertext ct;
  ct.variant = Variant::kSemiCompressed;
  ct.u_indices.reserve(static_cast<size_t>(ps.k) * ps.n);
  for (int i = 0; i < ps.k; ++i)
    for (int j = 0; j < ps.n; ++j)
      ct.u_indices.push_back(qu.index_of(up[i].c[j]));
  ct.v_part.assign(vp.c.begin(), vp.c.end());
  return ct;
}

/// Decrypts an SC ciphertext; a BCH decoding failure surfaces as nullopt.
inline std::optional<BitVec> decrypt_sc(const SecretKey& sk, const Ciphertext& ct,
                                        const ParamSet& ps, const BchCode& code,
                                        const IntQuantizer& qu) {
  if (ct.variant != Variant::kSemiCompressed)
    throw std::domain_error("decrypt_sc: variant mismatch");

  std::vector<std::array<int32_t, kN>> twice_u(static_cast<size_t>(ps.k));
  for (int i = 0; i < ps.k; ++i)
    for (int j = 0; j < ps.n; ++j)
      twice_u[static_cast<size_t>(i)][j] =
          qu.twice_level(ct.u_indices[static_cast<size_t>(i) * ps.n + j]);
  auto stu2 = detail::dot_scaled(sk.s, twice_u);

  const int32_t scale = (2 * kQ + ps.p) / (2 * ps.p);  // round(q/p)
  SymbolWord symbols(static_cast<size_t>(ps.n));
  for (int j = 0; j < ps.n; ++j) {
    int32_t y2 = 2 * static_cast<int32_t>(ct.v_part[static_cast<size_t>(j)]) - stu2[j];
    y2 %= 2 * kQ;
    if (y2 < 0) y2 += 2 * kQ;
    // symbol = round((y2/2)/scale) mod p, ties up
    int32_t s = ((y2 + scale) / (2 * scale)) % ps.p;
    symbols[static_cast<size_t>(j)] = static_cast<uint16_t>(s);
  }
  auto res = dec_pipeline_symbols(symbols, code, ps.p);
  if (!res) return std::nullopt;
  return res->message;
}

// ---------------------------------------------------------------------------
// Byte formats
//
// Values are packed little-endian bit order within bytes. pk: t at 12
// bits per coefficient then rho; sk: s at 12 bits; ciphertext: u at d_u
// bits then the v part at d_v (or 12) bits.

class BitWriter {
 public:
  void put(uint32_t v, int bits) {
    for (int i = 0; i < bits; ++i) {
      if (pos_ == 0) bytes_.push_back(0);
      bytes_.back() |= static_cast<uint8_t>(((v >> i) & 1u) << pos_);
      pos_ = (pos_ + 1) % 8;
    }
  }
  std::vector<uint8_t> take() { return std::move(bytes_); }

 private:
  std::vector<uint8_t> bytes_;
  int pos_ = 0;
};

class BitReader {
 public:
  explicit BitReader(std::span<const uint8_t> bytes) : bytes_(bytes) {}
  uint32_t get(int bits) {
    uint32_t v = 0;
    for (int i = 0; i < bits; ++i) {
      size_t byte = bit_ / 8;
      if (byte >= bytes_.size()) throw std::runtime_error("bit stream truncated");
      v |= static_cast<uint32_t>((bytes_[byte] >> (bit_ % 8)) & 1u) << i;
      ++bit_;
    }
    return v;
  }

 private:
  std::span<const uint8_t> bytes_;
  size_t bit_ = 0;
};

inline std::vector<uint8_t> serialize_pk(const PublicKey& pk, const ParamSet& ps) {
  BitWriter w;
  for (int i = 0; i < ps.k; ++i)
    for (int j = 0; j < ps.n; ++j) w.put(pk.t[static_cast<size_t>(i)].c[j], 12);
  auto out = w.take();
  out.insert(out.end(), pk.rho.begin(), pk.rho.end());
  return out;
}

inline PublicKey deserialize_pk(std::span<const uint8_t> bytes, const ParamSet& ps) {
  const size_t t_bytes = static_cast<size_t>(ps.k) * 384;
  if (bytes.size() != t_bytes + 32)
    throw std::runtime_error("public key: wrong length");
  BitReader r(bytes.first(t_bytes));
  PublicKey pk;
  pk.t.resize(static_cast<size_t>(ps.k));
  for (int i = 0; i < ps.k; ++i)
    for (int j = 0; j < ps.n; ++j) {
      uint32_t v = r.get(12);
      if (v >= kQ) throw std::runtime_error("public key: coefficient out of range");
      pk.t[static_cast<size_t>(i)].c[j] = static_cast<uint16_t>(v);
    }
  std::copy(bytes.end() - 32, bytes.end(), pk.rho.begin());
  return pk;
}

inline std::vector<uint8_t> serialize_sk(const SecretKey& sk, const ParamSet& ps) {
  BitWriter w;
  for (int i = 0; i < ps.k; ++i)
    for (int j = 0; j < ps.n; ++j) w.put(sk.s[static_cast<size_t>(i)].c[j], 12);
  return w.take();
}

inline SecretKey deserialize_sk(std::span<const uint8_t> bytes, const ParamSet& ps) {
  if (bytes.size() != static_cast<size_t>(ps.k) * 384)
    throw std::runtime_error("secret key: wrong length");
  BitReader r(bytes);
  SecretKey sk;
  sk.s.resize(static_cast<size_t>(ps.k));
  for (int i = 0; i < ps.k; ++i)
    for (int j = 0; j < ps.n; ++j) {
      uint32_t v = r.get(12);
      if (v >= kQ) throw std::runtime_error("secret key: coefficient out of range");
      sk.s[static_cast<size_t>(i)].c[j] = static_cast<uint16_t>(v);
    }
  return sk;
}

inline std::vector<uint8_t> serialize_ct(const Ciphertext& ct, const ParamSet& ps) {
  if (ct.variant != ps.variant) throw std::runtime_error("ciphertext: variant mismatch");
  BitWriter w;
  for (uint32_t v : ct.u_indices) w.put(v, ps.d_u);
  for (uint32_t v : ct.v_part) w.put(v, ps.d_v);
  return w.take();
}

inline Ciphertext deserialize_ct(std::span<const uint8_t> bytes, const ParamSet& ps) {
  if (bytes.size() != ps.ciphertext_bytes())
    throw std::runtime_error("ciphertext: wrong length");
  BitReader r(bytes);
  Ciphertext ct;
  ct.variant = ps.variant;
  const uint32_t v_bound =
      ps.variant == Variant::kSemiCompressed ? kQ : (1u << ps.d_v);
  ct.u_indices.resize(static_cast<size_t>(ps.k) * ps.n);
  for (auto& v : ct.u_indices) v = r.get(ps.d_u);
  ct.v_part.resize(static_cast<size_t>(ps.n));
  for (auto& v : ct.v_part) {
    v = r.get(ps.d_v);
    if (v >= v_bound) throw std::runtime_error("ciphertext: value out of range");
  }
  return ct;
}

// message file <-> bit vector (LSB-first within bytes; pad bits must be zero)

inline BitVec bits_from_bytes(std::span<const uint8_t> bytes, int nbits) {
  if (bytes.size() != static_cast<size_t>((nbits + 7) / 8))
    throw std::runtime_error("message: wrong length");
  BitVec bits(static_cast<size_t>(nbits));
  for (int i = 0; i < nbits; ++i)
    bits[static_cast<size_t>(i)] = (bytes[static_cast<size_t>(i) / 8] >> (i % 8)) & 1;
  for (size_t i = static_cast<size_t>(nbits); i < bytes.size() * 8; ++i)
    if ((bytes[i / 8] >> (i % 8)) & 1)
      throw std::runtime_error("message: nonzero padding bits");
  return bits;
}

inline std::vector<uint8_t> bytes_from_bits(const BitVec& bits) {
  std::vector<uint8_t> out((bits.size() + 7) / 8, 0);
  for (size_t i = 0; i < bits.size(); ++i)
    out[i / 8] |= static_cast<uint8_t>((bits[i] & 1) << (i % 8));
  return out;
}

}  // namespace sck

#endif  // SCK_PKE_HPP
