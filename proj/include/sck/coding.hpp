/**
 * SC-Kyber plaintext pipeline: BCH code + binary-reflected Gray mapping
 * onto shifted p-PAM symbols. Bit order is most-significant-bit-first
 * within each Gray group (test-pinned).
 */

#ifndef SCK_CODING_HPP
#define SCK_CODING_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "sck/bch.hpp"
#include "sck/params.hpp"

namespace sck {

using SymbolWord = std::vector<uint16_t>;  // n symbols in [0, p)

inline int log2_exact(int p) {
  int l = 0;
  while ((1 << l) < p) ++l;
  if ((1 << l) != p) throw std::domain_error("p must be a power of two");
  return l;
}

/// Binary-reflected Gray code of s.
inline uint16_t gray_encode(uint16_t s) { return s ^ (s >> 1); }

inline uint16_t gray_decode(uint16_t g) {
  uint16_t s = g;
  for (uint16_t shift = 1; shift < 16; shift <<= 1) s ^= s >> shift;
  return s;
}

/// N bits -> n symbols: each log2(p)-bit group (MSB first) is read as a
/// Gray codeword; the symbol is its Gray preimage. For p = 8 this gives
/// bits 110 -> symbol 4, bits 100 -> symbol 7.
inline SymbolWord gray_map(const BitVec& bits, int p) {
  const int g = log2_exact(p);
  if (bits.size() % static_cast<size_t>(g) != 0)
    throw std::domain_error("gray_map: bit length not a multiple of log2(p)");
  SymbolWord out(bits.size() / static_cast<size_t>(g));
  for (size_t i = 0; i < out.size(); ++i) {
    uint16_t v = 0;
    for (int j = 0; j < g; ++j)
      v = static_cast<uint16_t>((v << 1) | bits[i * static_cast<size_t>(g) +
                                               static_cast<size_t>(j)]);
    out[i] = gray_decode(v);
  }
  return out;
}

inline BitVec gray_demap(const SymbolWord& symbols, int p) {
  const int g = log2_exact(p);
  BitVec out(symbols.size() * static_cast<size_t>(g));
  for (size_t i = 0; i < symbols.size(); ++i) {
    if (symbols[i] >= p) throw std::domain_error("gray_demap: symbol out of range");
    uint16_t v = gray_encode(symbols[i]);
    for (int j = 0; j < g; ++j)
      out[i * static_cast<size_t>(g) + static_cast<size_t>(j)] =
          static_cast<uint8_t>((v >> (g - 1 - j)) & 1);
  }
  return out;
}

/// ENC(m) = Gray(B-Enc(m)): K bits -> n symbols in [0, p).
inline SymbolWord enc_pipeline(const BitVec& message, const BchCode& code, int p) {
  return gray_map(code.encode(message), p);
}

/// DEC for already-rounded symbols: Gray-demap then BCH-decode.
inline std::optional<BchDecodeResult> dec_pipeline_symbols(
    const SymbolWord& symbols, const BchCode& code, int p) {
  return code.decode(gray_demap(symbols, p));
}

inline BigInt rational_floor(const Rational& r) {
  BigInt n = numerator(r), d = denominator(r);
  BigInt q = n / d;  // truncating
  if (q * d != n && n < 0) --q;
  return q;
}

/// round(x) with ties up, matching the compress convention.
inline BigInt round_half_up(const Rational& x) {
  return rational_floor(x + Rational(1, 2));
}

/// DEC(x) = B-Dec(Gray^-1(round(x) mod p)) for rational observations y_i.
inline std::optional<BchDecodeResult> dec_pipeline(
    const std::vector<Rational>& y, const BchCode& code, int p) {
  SymbolWord symbols(y.size());
  for (size_t i = 0; i < y.size(); ++i) {
    BigInt s = round_half_up(y[i]) % p;
    if (s < 0) s += p;
    symbols[i] = s.convert_to<uint16_t>();
  }
  return dec_pipeline_symbols(symbols, code, p);
}

}  // namespace sck

#endif  // SCK_CODING_HPP
