/**
 * Keccak-f[1600] sponge and the SHAKE-128/256 extendable-output functions.
 *
 * Only the XOF interface is exposed: absorb a short input once, then
 * squeeze arbitrarily many bytes.
 */

#ifndef SCK_KECCAK_HPP
#define SCK_KECCAK_HPP

#include <array>
#include <cstdint>
#include <cstring>
#include <span>

namespace sck {

namespace detail {

inline constexpr std::array<uint64_t, 24> kRoundConstants = {
    0x0000000000000001ULL, 0x0000000000008082ULL, 0x800000000000808aULL,
    0x8000000080008000ULL, 0x000000000000808bULL, 0x0000000080000001ULL,
    0x8000000080008081ULL, 0x8000000000008009ULL, 0x000000000000008aULL,
    0x0000000000000088ULL, 0x0000000080008009ULL, 0x000000008000000aULL,
    0x000000008000808bULL, 0x800000000000008bULL, 0x8000000000008089ULL,
    0x8000000000008003ULL, 0x8000000000008002ULL, 0x8000000000000080ULL,
    0x000000000000800aULL, 0x800000008000000aULL, 0x8000000080008081ULL,
    0x8000000000008080ULL, 0x0000000080000001ULL, 0x8000000080008008ULL};

inline constexpr uint64_t rotl64(uint64_t x, unsigned s) {
  return (x << s) | (x >> (64 - s));
}

inline void keccak_f1600(std::array<uint64_t, 25>& st) {
  for (uint64_t rc : kRoundConstants) {
    // theta
    uint64_t bc[5];
    for (int i = 0; i < 5; ++i)
      bc[i] = st[i] ^ st[i + 5] ^ st[i + 10] ^ st[i + 15] ^ st[i + 20];
    for (int i = 0; i < 5; ++i) {
      uint64_t t = bc[(i + 4) % 5] ^ rotl64(bc[(i + 1) % 5], 1);
      for (int j = 0; j < 25; j += 5) st[j + i] ^= t;
    }
    // rho + pi
    uint64_t t = st[1];
    static constexpr int kPi[24] = {10, 7,  11, 17, 18, 3,  5,  16,
                                    8,  21, 24, 4,  15, 23, 19, 13,
                                    12, 2,  20, 14, 22, 9,  6,  1};
    static constexpr int kRho[24] = {1,  3,  6,  10, 15, 21, 28, 36,
                                     45, 55, 2,  14, 27, 41, 56, 8,
                                     25, 43, 62, 18, 39, 61, 20, 44};
    for (int i = 0; i < 24; ++i) {
      uint64_t tmp = st[kPi[i]];
      st[kPi[i]] = rotl64(t, static_cast<unsigned>(kRho[i]));
      t = tmp;
    }
    // chi
    for (int j = 0; j < 25; j += 5) {
      for (int i = 0; i < 5; ++i) bc[i] = st[j + i];
      for (int i = 0; i < 5; ++i)
        st[j + i] = bc[i] ^ (~bc[(i + 1) % 5] & bc[(i + 2) % 5]);
    }
    // iota
    st[0] ^= rc;
  }
}

}  // namespace detail

/// Incremental SHAKE XOF. Rate is 168 bytes for SHAKE-128, 136 for SHAKE-256.
template <size_t Rate>
class Shake {
 public:
  /// Absorbs the whole input and switches to squeezing mode.
  explicit Shake(std::span<const uint8_t> input) {
    state_.fill(0);
    size_t off = 0;
    while (input.size() - off >= Rate) {
      absorb_block(input.data() + off, Rate);
      detail::keccak_f1600(state_);
      off += Rate;
    }
    uint8_t last[Rate] = {0};
    std::memcpy(last, input.data() + off, input.size() - off);
    last[input.size() - off] ^= 0x1f;  // SHAKE domain separator
    last[Rate - 1] ^= 0x80;
    absorb_block(last, Rate);
    detail::keccak_f1600(state_);
    pos_ = 0;
  }

  void squeeze(uint8_t* out, size_t len) {
    while (len > 0) {
      if (pos_ == Rate) {
        detail::keccak_f1600(state_);
        pos_ = 0;
      }
      size_t n = std::min(len, Rate - pos_);
      for (size_t i = 0; i < n; ++i)
        out[i] = static_cast<uint8_t>(state_[(pos_ + i) / 8] >>
                                      (8 * ((pos_ + i) % 8)));
      pos_ += n;
      out += n;
      len -= n;
    }
  }

 private:
  void absorb_block(const uint8_t* block, size_t len) {
    for (size_t i = 0; i < len; ++i)
      state_[i / 8] ^= static_cast<uint64_t>(block[i]) << (8 * (i % 8));
  }

  std::array<uint64_t, 25> state_;
  size_t pos_ = Rate;
};

using Shake128 = Shake<168>;
using Shake256 = Shake<136>;

}  // namespace sck

#endif  // SCK_KECCAK_HPP
