/**
 * Deterministic expansion of seeds into the public matrix A and
 * centered-binomial noise.
 *
 * "Sam" is instantiated as SHAKE-128 for matrix expansion (input
 * rho || col || row, rejection-sampling 12-bit values below q) and
 * SHAKE-256 for CBD noise (input sigma || nonce).
 */

#ifndef SCK_SAMPLING_HPP
#define SCK_SAMPLING_HPP

#include <array>
#include <bit>
#include <cstdint>
#include <stdexcept>

#include "sck/keccak.hpp"
#include "sck/ring.hpp"

namespace sck {

using Seed = std::array<uint8_t, 32>;

/// Uniform polynomial from SHAKE-128(rho || col || row), 12-bit rejection.
inline Poly sample_uniform(const Seed& rho, uint8_t col, uint8_t row) {
  std::array<uint8_t, 34> input;
  std::copy(rho.begin(), rho.end(), input.begin());
  input[32] = col;
  input[33] = row;
  Shake128 xof({input.data(), input.size()});

  Poly p;
  int count = 0;
  uint8_t buf[168];
  while (count < kN) {
    xof.squeeze(buf, sizeof buf);
    for (size_t i = 0; i + 3 <= sizeof buf && count < kN; i += 3) {
      uint16_t d1 = static_cast<uint16_t>(buf[i] | ((buf[i + 1] & 0x0f) << 8));
      uint16_t d2 = static_cast<uint16_t>((buf[i + 1] >> 4) | (buf[i + 2] << 4));
      if (d1 < kQ) p.c[count++] = d1;
      if (d2 < kQ && count < kN) p.c[count++] = d2;
    }
  }
  return p;
}

/// A[i][j] = sample_uniform(rho, j, i); deterministic in rho.
inline PolyMat expand_matrix(const Seed& rho, int k) {
  PolyMat A(k, PolyVec(k));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      A[i][j] = sample_uniform(rho, static_cast<uint8_t>(j),
                               static_cast<uint8_t>(i));
  return A;
}

/// Centered binomial beta_eta from SHAKE-256(sigma || nonce).
/// Each coefficient is (sum of eta bits) - (sum of eta bits), stored mod q.
inline Poly cbd(const Seed& sigma, uint8_t nonce, int eta) {
  if (eta < 1 || eta > 3) throw std::domain_error("cbd: eta must be 1, 2, or 3");
  std::array<uint8_t, 33> input;
  std::copy(sigma.begin(), sigma.end(), input.begin());
  input[32] = nonce;
  Shake256 xof({input.data(), input.size()});

  Poly p;
  if (eta == 1) {
    uint8_t buf[64];
    xof.squeeze(buf, sizeof buf);
    for (int i = 0; i < kN / 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        int a = (buf[i] >> (2 * j)) & 1;
        int b = (buf[i] >> (2 * j + 1)) & 1;
        p.c[4 * i + j] = static_cast<uint16_t>((a - b + kQ) % kQ);
      }
    }
  } else if (eta == 2) {
    uint8_t buf[128];
    xof.squeeze(buf, sizeof buf);
    for (int i = 0; i < kN / 8; ++i) {
      uint32_t t;
      std::memcpy(&t, buf + 4 * i, 4);
      uint32_t d = (t & 0x55555555u) + ((t >> 1) & 0x55555555u);
      for (int j = 0; j < 8; ++j) {
        int a = (d >> (4 * j)) & 0x3;
        int b = (d >> (4 * j + 2)) & 0x3;
        p.c[8 * i + j] = static_cast<uint16_t>((a - b + kQ) % kQ);
      }
    }
  } else {
    uint8_t buf[192];
    xof.squeeze(buf, sizeof buf);
    for (int i = 0; i < kN / 4; ++i) {
      uint32_t t = buf[3 * i] | (buf[3 * i + 1] << 8) | (buf[3 * i + 2] << 16);
      uint32_t d = (t & 0x00249249u) + ((t >> 1) & 0x00249249u) +
                   ((t >> 2) & 0x00249249u);
      for (int j = 0; j < 4; ++j) {
        int a = (d >> (6 * j)) & 0x7;
        int b = (d >> (6 * j + 3)) & 0x7;
        p.c[4 * i + j] = static_cast<uint16_t>((a - b + kQ) % kQ);
      }
    }
  }
  return p;
}

}  // namespace sck

#endif  // SCK_SAMPLING_HPP
