/**
 * Arithmetic in R_q = Z_q[X]/(X^n + 1) with n = 256, q = 3329.
 *
 * Coefficients are kept fully reduced in [0, q). Multiplication runs
 * through the incomplete negacyclic NTT (seven layers, degree-2 base
 * multiplication with zeta = 17); correctness is pinned against a
 * schoolbook oracle in the test suite.
 */

#ifndef SCK_RING_HPP
#define SCK_RING_HPP

#include <array>
#include <bitset>
#include <cstdint>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace sck {

inline constexpr int kN = 256;
inline constexpr int kQ = 3329;

struct Poly {
  std::array<uint16_t, kN> c{};

  bool operator==(const Poly&) const = default;
};

using PolyVec = std::vector<Poly>;          // length k
using PolyMat = std::vector<PolyVec>;       // k x k, row major

namespace detail {

inline uint16_t add_mod(uint16_t a, uint16_t b) {
  uint16_t s = static_cast<uint16_t>(a + b);
  return s >= kQ ? static_cast<uint16_t>(s - kQ) : s;
}

inline uint16_t sub_mod(uint16_t a, uint16_t b) {
  return a >= b ? static_cast<uint16_t>(a - b)
                : static_cast<uint16_t>(a + kQ - b);
}

inline uint16_t mul_mod(uint32_t a, uint32_t b) {
  return static_cast<uint16_t>((a * b) % kQ);
}

inline uint16_t pow_mod(uint16_t base, unsigned e) {
  uint32_t r = 1, b = base;
  while (e) {
    if (e & 1) r = r * b % kQ;
    b = b * b % kQ;
    e >>= 1;
  }
  return static_cast<uint16_t>(r);
}

inline unsigned bitrev7(unsigned x) {
  unsigned r = 0;
  for (int i = 0; i < 7; ++i) r |= ((x >> i) & 1u) << (6 - i);
  return r;
}

// zetas[i] = 17^bitrev7(i) mod q, the layer twiddles of the Kyber-style NTT.
struct NttTables {
  std::array<uint16_t, 128> zetas;
  NttTables() {
    for (unsigned i = 0; i < 128; ++i) zetas[i] = pow_mod(17, bitrev7(i));
  }
};

inline const NttTables& ntt_tables() {
  static const NttTables t;
  return t;
}

}  // namespace detail

/// Forward NTT, in place. Output order matches the classic Kyber layout.
inline void ntt(Poly& p) {
  const auto& z = detail::ntt_tables().zetas;
  unsigned k = 1;
  for (unsigned len = 128; len >= 2; len >>= 1) {
    for (unsigned start = 0; start < kN; start += 2 * len) {
      uint16_t zeta = z[k++];
      for (unsigned j = start; j < start + len; ++j) {
        uint16_t t = detail::mul_mod(zeta, p.c[j + len]);
        p.c[j + len] = detail::sub_mod(p.c[j], t);
        p.c[j] = detail::add_mod(p.c[j], t);
      }
    }
  }
}

/// Inverse NTT, in place.
inline void inv_ntt(Poly& p) {
  const auto& z = detail::ntt_tables().zetas;
  unsigned k = 127;
  for (unsigned len = 2; len <= 128; len <<= 1) {
    for (unsigned start = 0; start < kN; start += 2 * len) {
      uint16_t zeta = z[k--];
      for (unsigned j = start; j < start + len; ++j) {
        uint16_t t = p.c[j];
        p.c[j] = detail::add_mod(t, p.c[j + len]);
        p.c[j + len] = detail::mul_mod(zeta, detail::sub_mod(p.c[j + len], t));
      }
    }
  }
  constexpr uint16_t kInv128 = 3303;  // 128^-1 mod q
  for (auto& x : p.c) x = detail::mul_mod(x, kInv128);
}

/// Pointwise product of two NTT-domain polynomials (128 degree-2 pairs).
inline Poly ntt_pointwise(const Poly& a, const Poly& b) {
  const auto& z = detail::ntt_tables().zetas;
  Poly r;
  for (unsigned i = 0; i < 64; ++i) {
    uint16_t zeta = z[64 + i];
    uint16_t nzeta = detail::sub_mod(0, zeta);
    auto basemul = [](uint16_t a0, uint16_t a1, uint16_t b0, uint16_t b1,
                      uint16_t zz) -> std::pair<uint16_t, uint16_t> {
      uint16_t c0 = detail::add_mod(detail::mul_mod(a0, b0),
                                    detail::mul_mod(detail::mul_mod(a1, b1), zz));
      uint16_t c1 = detail::add_mod(detail::mul_mod(a0, b1),
                                    detail::mul_mod(a1, b0));
      return {c0, c1};
    };
    unsigned j = 4 * i;
    std::tie(r.c[j], r.c[j + 1]) = basemul(a.c[j], a.c[j + 1], b.c[j], b.c[j + 1], zeta);
    std::tie(r.c[j + 2], r.c[j + 3]) =
        basemul(a.c[j + 2], a.c[j + 3], b.c[j + 2], b.c[j + 3], nzeta);
  }
  return r;
}

inline Poly poly_add(const Poly& a, const Poly& b) {
  Poly r;
  for (int i = 0; i < kN; ++i) r.c[i] = detail::add_mod(a.c[i], b.c[i]);
  return r;
}

inline Poly poly_sub(const Poly& a, const Poly& b) {
  Poly r;
  for (int i = 0; i < kN; ++i) r.c[i] = detail::sub_mod(a.c[i], b.c[i]);
  return r;
}

/// Product in R_q via NTT.
inline Poly poly_mul(const Poly& a, const Poly& b) {
  Poly fa = a, fb = b;
  ntt(fa);
  ntt(fb);
  Poly r = ntt_pointwise(fa, fb);
  inv_ntt(r);
  return r;
}

/// Centered representative in (-q/2, q/2].
inline int centered(uint16_t x) {
  int v = x;
  return v > kQ / 2 ? v - kQ : v;
}

inline Poly scalar_mul(const Poly& a, uint16_t s) {
  Poly r;
  for (int i = 0; i < kN; ++i) r.c[i] = detail::mul_mod(a.c[i], s);
  return r;
}

inline Poly inner_product(const PolyVec& a, const PolyVec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("polyvec size mismatch");
  Poly acc;
  for (size_t i = 0; i < a.size(); ++i) {
    Poly fa = a[i], fb = b[i];
    ntt(fa);
    ntt(fb);
    acc = poly_add(acc, ntt_pointwise(fa, fb));
  }
  inv_ntt(acc);
  return acc;
}

/// A^T r: entry i is sum_j A[j][i] * r[j].
inline PolyVec matvec_t(const PolyMat& A, const PolyVec& r) {
  const size_t k = A.size();
  if (r.size() != k) throw std::invalid_argument("matvec dimension mismatch");
  for (const auto& row : A)
    if (row.size() != k) throw std::invalid_argument("matrix not square");

  std::vector<Poly> r_hat(k);
  for (size_t j = 0; j < k; ++j) {
    r_hat[j] = r[j];
    ntt(r_hat[j]);
  }
  PolyVec out(k);
  for (size_t i = 0; i < k; ++i) {
    Poly acc;
    for (size_t j = 0; j < k; ++j) {
      Poly a = A[j][i];
      ntt(a);
      acc = poly_add(acc, ntt_pointwise(a, r_hat[j]));
    }
    inv_ntt(acc);
    out[i] = acc;
  }
  return out;
}

/// Negacyclic convolution of s against a bit polynomial f, reduced mod 2.
/// Uses the centered representatives of s, so the result is the parity of
/// the exact integer convolution. Sign flips vanish mod 2, so this is
/// carry-free shift-and-xor.
inline std::bitset<kN> bit_conv_mod2(const Poly& s, const std::bitset<kN>& f) {
  std::bitset<kN> sbits;
  for (int i = 0; i < kN; ++i) sbits[i] = centered(s.c[i]) & 1;
  std::bitset<kN> acc;
  for (int i = 0; i < kN; ++i) {
    if (!f[i]) continue;
    // multiply by X^i: wrapped terms negate, which is identity mod 2
    acc ^= (sbits << i) ^ (sbits >> (kN - i));
  }
  return acc;
}

}  // namespace sck

#endif  // SCK_RING_HPP
