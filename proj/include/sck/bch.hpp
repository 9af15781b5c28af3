/**
 * Binary narrow-sense BCH codes, optionally shortened, with systematic
 * encoding and a fixed-schedule syndrome / Berlekamp-Massey / Chien
 * decoder (constant-flow contract: iteration counts do not depend on
 * the error pattern).
 */

#ifndef SCK_BCH_HPP
#define SCK_BCH_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "sck/gf2m.hpp"
#include "sck/params.hpp"

namespace sck {

using BitVec = std::vector<uint8_t>;  // one bit per element

struct BchDecodeResult {
  BitVec message;
  int corrected = 0;
};

class BchCode {
 public:
  /// Builds the narrow-sense code with designed distance 2t+1 over
  /// GF(2^m) and checks it against the spec (generator degree must
  /// equal parentN - parentK).
  BchCode(const CodeSpec& spec, uint32_t modulus)
      : spec_(spec), field_(spec.m, modulus) {
    if (spec.parent_n != static_cast<int>(field_.order()))
      throw std::domain_error("bch: parentN must be 2^m - 1");
    if (spec.n_bits > spec.parent_n || spec.k_bits <= 0)
      throw std::domain_error("bch: invalid shortened length");

    generator_ = build_generator();
    const int r = generator_.degree();
    if (r != spec.parent_n - spec.parent_k)
      throw std::domain_error("bch: generator degree does not match code spec");
    if (spec.k_bits != spec.n_bits - r)
      throw std::domain_error("bch: K inconsistent with generator degree");
  }

  const CodeSpec& spec() const { return spec_; }
  const GF2mField& field() const { return field_; }
  const GF2Poly& generator() const { return generator_; }

  /// Systematic encode: codeword = [parity (r bits) | message (K bits)],
  /// bit j of the output being the coefficient of X^j. Shortening fixes
  /// the top parentN - N positions to zero.
  BitVec encode(const BitVec& message) const {
    const int r = generator_.degree();
    if (static_cast<int>(message.size()) != spec_.k_bits)
      throw std::domain_error("bch: message length must be K");

    GF2Poly shifted;
    shifted.coeff.assign(static_cast<size_t>(r + spec_.k_bits), 0);
    for (int i = 0; i < spec_.k_bits; ++i)
      shifted.coeff[static_cast<size_t>(r + i)] = message[static_cast<size_t>(i)];
    GF2Poly rem = shifted.mod(generator_);

    BitVec cw(static_cast<size_t>(spec_.n_bits), 0);
    for (int j = 0; j <= rem.degree(); ++j)
      cw[static_cast<size_t>(j)] = rem.coeff[static_cast<size_t>(j)];
    for (int i = 0; i < spec_.k_bits; ++i)
      cw[static_cast<size_t>(r + i)] = message[static_cast<size_t>(i)];
    return cw;
  }

  /// Bounded-distance decode. Returns the message and the number of
  /// corrected bits if the received word lies within Hamming distance t
  /// of a codeword; std::nullopt on detected failure. Syndromes,
  /// Berlekamp-Massey, and the Chien search all run fixed schedules.
  std::optional<BchDecodeResult> decode(const BitVec& received) const {
    if (static_cast<int>(received.size()) != spec_.n_bits)
      throw std::domain_error("bch: received length must be N");
    const int t = spec_.t;
    const int n2t = 2 * t;

    // syndromes S_j = r(alpha^j), j = 1..2t, over all N positions
    std::vector<uint32_t> S(static_cast<size_t>(n2t), 0);
    for (int j = 1; j <= n2t; ++j) {
      uint32_t acc = 0;
      for (int i = 0; i < spec_.n_bits; ++i) {
        uint32_t term = field_.pow_alpha(static_cast<int64_t>(j) * i);
        acc ^= term & (-static_cast<uint32_t>(received[static_cast<size_t>(i)] & 1));
      }
      S[static_cast<size_t>(j - 1)] = acc;
    }

    // Berlekamp-Massey, fixed 2t iterations
    std::vector<uint32_t> C(static_cast<size_t>(t + 1), 0), B = C, T = C;
    C[0] = 1;
    B[0] = 1;
    int L = 0, shift = 1;
    uint32_t b = 1;
    for (int n = 0; n < n2t; ++n) {
      uint32_t d = S[static_cast<size_t>(n)];
      for (int i = 1; i <= L && i <= t; ++i)
        if (n - i >= 0) d ^= field_.mul(C[static_cast<size_t>(i)], S[static_cast<size_t>(n - i)]);
      if (d == 0) {
        ++shift;
      } else if (2 * L <= n) {
        T = C;
        uint32_t coef = field_.mul(d, field_.inv(b));
        for (int i = 0; i + shift <= t; ++i)
          C[static_cast<size_t>(i + shift)] ^= field_.mul(coef, B[static_cast<size_t>(i)]);
        L = n + 1 - L;
        B = T;
        b = d;
        shift = 1;
      } else {
        uint32_t coef = field_.mul(d, field_.inv(b));
        for (int i = 0; i + shift <= t; ++i)
          C[static_cast<size_t>(i + shift)] ^= field_.mul(coef, B[static_cast<size_t>(i)]);
        ++shift;
      }
    }
    if (L > t) return std::nullopt;

    // Chien search over the N used positions
    BitVec corrected = received;
    int roots = 0;
    for (int i = 0; i < spec_.n_bits; ++i) {
      uint32_t acc = 0;
      for (int j = 0; j <= t; ++j)
        acc ^= field_.mul(C[static_cast<size_t>(j)],
                          field_.pow_alpha(-static_cast<int64_t>(j) * i));
      if (acc == 0) {
        corrected[static_cast<size_t>(i)] ^= 1;
        ++roots;
      }
    }
    if (roots != L) return std::nullopt;

    // re-check: corrected word must have zero syndromes (rejects locator
    // polynomials whose remaining roots fell in the shortened positions)
    for (int j = 1; j <= n2t; ++j) {
      uint32_t acc = 0;
      for (int i = 0; i < spec_.n_bits; ++i) {
        uint32_t term = field_.pow_alpha(static_cast<int64_t>(j) * i);
        acc ^= term & (-static_cast<uint32_t>(corrected[static_cast<size_t>(i)] & 1));
      }
      if (acc != 0) return std::nullopt;
    }

    BchDecodeResult out;
    out.corrected = roots;
    const int r = generator_.degree();
    out.message.assign(corrected.begin() + r, corrected.end());
    return out;
  }

 private:
  GF2Poly build_generator() const {
    const uint32_t n = field_.order();
    std::vector<uint8_t> covered(n, 0);
    GF2Poly gen = GF2Poly::one();
    for (int e = 1; e <= 2 * spec_.t; ++e) {
      uint32_t rep = static_cast<uint32_t>(e) % n;
      if (covered[rep]) continue;
      // cyclotomic coset of rep
      std::vector<uint32_t> coset;
      uint32_t x = rep;
      do {
        covered[x] = 1;
        coset.push_back(x);
        x = static_cast<uint32_t>((2ull * x) % n);
      } while (x != rep);
      // minimal polynomial: product of (X - alpha^j) over the coset,
      // computed over GF(2^m); the result has 0/1 coefficients
      std::vector<uint32_t> mp{1};
      for (uint32_t j : coset) {
        std::vector<uint32_t> next(mp.size() + 1, 0);
        uint32_t root = field_.pow_alpha(j);
        for (size_t i = 0; i < mp.size(); ++i) {
          next[i + 1] ^= mp[i];
          next[i] ^= field_.mul(mp[i], root);
        }
        mp = std::move(next);
      }
      GF2Poly mpoly;
      mpoly.coeff.resize(mp.size());
      for (size_t i = 0; i < mp.size(); ++i) {
        if (mp[i] > 1) throw std::logic_error("bch: minimal polynomial not binary");
        mpoly.coeff[i] = static_cast<uint8_t>(mp[i]);
      }
      gen = gen * mpoly;
    }
    gen.trim();
    return gen;
  }

  CodeSpec spec_;
  GF2mField field_;
  GF2Poly generator_;
};

/// Primitive polynomial X^10 + X^3 + 1 for the GF(2^10) codes used here.
inline constexpr uint32_t kGf2m10Modulus = 0x409;

/// Builds the code named by a parameter set's CodeSpec.
inline BchCode make_bch(const CodeSpec& spec) {
  uint32_t modulus;
  switch (spec.m) {
    case 4: modulus = 0x13; break;   // X^4 + X + 1
    case 6: modulus = 0x43; break;   // X^6 + X + 1
    case 10: modulus = kGf2m10Modulus; break;
    default: throw std::domain_error("bch: no primitive polynomial on file for this m");
  }
  return BchCode(spec, modulus);
}

}  // namespace sck

#endif  // SCK_BCH_HPP
