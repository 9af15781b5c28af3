#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <bit>
#include <numeric>
#include <random>

#include "sck/coding.hpp"

namespace {

using namespace sck;

TEST_CASE("gray code basics", "[coding]") {
  // adjacent codewords differ in exactly one bit
  for (uint16_t s = 0; s + 1 < 16; ++s)
    CHECK(std::popcount(static_cast<unsigned>(gray_encode(s) ^
                                              gray_encode(s + 1))) == 1);
  for (uint16_t v = 0; v < 64; ++v) CHECK(gray_decode(gray_encode(v)) == v);
}

TEST_CASE("8-pam symbol mapping", "[coding]") {
  // symbol -> bits (msb first): 0:000 1:001 2:011 3:010 4:110 5:111 6:101 7:100
  const uint16_t expected_bits[8] = {0b000, 0b001, 0b011, 0b010,
                                     0b110, 0b111, 0b101, 0b100};
  for (uint16_t sym = 0; sym < 8; ++sym) {
    BitVec bits(3);
    for (int b = 0; b < 3; ++b)
      bits[static_cast<size_t>(b)] =
          static_cast<uint8_t>((expected_bits[sym] >> (2 - b)) & 1);
    SymbolWord got = gray_map(bits, 8);
    REQUIRE(got.size() == 1);
    CHECK(got[0] == sym);
    CHECK(gray_demap(got, 8) == bits);
  }
}

TEST_CASE("gray map/demap round trip", "[coding]") {
  std::mt19937 rng(21);
  std::bernoulli_distribution bit(0.5);
  for (int p : {2, 4, 8, 16}) {
    int log2p = std::bit_width(static_cast<unsigned>(p)) - 1;
    BitVec bits(static_cast<size_t>(32 * log2p));
    for (auto& b : bits) b = bit(rng);
    CHECK(gray_demap(gray_map(bits, p), p) == bits);
  }
}

TEST_CASE("bch generator and dimensions", "[coding]") {
  BchCode code = make_bch(CodeSpec{768, 638, 13, 10, 1023, 893});
  CHECK(code.generator().degree() == 130);
  CHECK(code.spec().k_bits == 638);

  BchCode code2 = make_bch(CodeSpec{768, 513, 26, 10, 1023, 768});
  CHECK(code2.generator().degree() == 255);
  CHECK(code2.spec().k_bits == 513);
}

TEST_CASE("bch codewords have zero syndromes under an independent check",
          "[coding]") {
  // evaluate the codeword polynomial at alpha^j, j = 1..2t, directly
  CodeSpec spec{768, 638, 13, 10, 1023, 893};
  BchCode code = make_bch(spec);
  GF2mField field(10, kGf2m10Modulus);
  std::mt19937 rng(3);
  std::bernoulli_distribution bit(0.5);
  for (int trial = 0; trial < 5; ++trial) {
    BitVec m(638);
    for (auto& b : m) b = bit(rng);
    BitVec cw = code.encode(m);
    // shortened code: high-order (parent) positions are implicitly zero
    for (int j = 1; j <= 2 * spec.t; ++j) {
      uint32_t s = 0;
      for (size_t i = 0; i < cw.size(); ++i)
        if (cw[i]) s ^= field.pow_alpha(static_cast<int64_t>(i) * j);
      CHECK(s == 0);
    }
  }
}

TEST_CASE("bch corrects up to t errors and flags overload", "[coding]") {
  CodeSpec spec{768, 638, 13, 10, 1023, 893};
  BchCode code = make_bch(spec);
  std::mt19937 rng(17);
  std::bernoulli_distribution bit(0.5);
  for (int trial = 0; trial < 30; ++trial) {
    BitVec m(638);
    for (auto& b : m) b = bit(rng);
    BitVec cw = code.encode(m);

    int nerr = trial % (spec.t + 1);
    BitVec noisy = cw;
    std::vector<size_t> pos(noisy.size());
    std::iota(pos.begin(), pos.end(), size_t{0});
    std::shuffle(pos.begin(), pos.end(), rng);
    for (int e = 0; e < nerr; ++e) noisy[pos[static_cast<size_t>(e)]] ^= 1;

    auto res = code.decode(noisy);
    REQUIRE(res.has_value());
    CHECK(res->message == m);
    CHECK(res->corrected == nerr);
  }
  // t+1 errors are never silently "corrected" back to the original
  for (int trial = 0; trial < 20; ++trial) {
    BitVec m(638);
    for (auto& b : m) b = bit(rng);
    BitVec noisy = code.encode(m);
    std::vector<size_t> pos(noisy.size());
    std::iota(pos.begin(), pos.end(), size_t{0});
    std::shuffle(pos.begin(), pos.end(), rng);
    for (int e = 0; e < spec.t + 1; ++e) noisy[pos[static_cast<size_t>(e)]] ^= 1;
    auto res = code.decode(noisy);
    CHECK((!res || res->message != m));
  }
}

TEST_CASE("degenerate t=0 code is the identity map", "[coding]") {
  BchCode code = make_bch(CodeSpec{256, 256, 0, 10, 1023, 1023});
  std::mt19937 rng(4);
  std::bernoulli_distribution bit(0.5);
  BitVec m(256);
  for (auto& b : m) b = bit(rng);
  CHECK(code.encode(m) == m);
  auto res = code.decode(m);
  REQUIRE(res.has_value());
  CHECK(res->message == m);
  CHECK(res->corrected == 0);
}

TEST_CASE("pipeline: encode/map then demap/decode is the identity",
          "[coding]") {
  BchCode code = make_bch(CodeSpec{768, 638, 13, 10, 1023, 893});
  std::mt19937 rng(11);
  std::bernoulli_distribution bit(0.5);
  for (int trial = 0; trial < 5; ++trial) {
    BitVec m(638);
    for (auto& b : m) b = bit(rng);
    SymbolWord x = enc_pipeline(m, code, 8);
    REQUIRE(x.size() == 256);
    auto res = dec_pipeline_symbols(x, code, 8);
    REQUIRE(res.has_value());
    CHECK(res->message == m);
  }
}

TEST_CASE("pipeline survives t adjacent-symbol slips", "[coding]") {
  BchCode code = make_bch(CodeSpec{768, 638, 13, 10, 1023, 893});
  std::mt19937 rng(13);
  std::bernoulli_distribution bit(0.5);
  BitVec m(638);
  for (auto& b : m) b = bit(rng);
  SymbolWord x = enc_pipeline(m, code, 8);
  // an adjacent-symbol slip costs exactly one bit under the Gray map
  std::vector<size_t> pos(x.size());
  std::iota(pos.begin(), pos.end(), size_t{0});
  std::shuffle(pos.begin(), pos.end(), rng);
  for (int e = 0; e < 13; ++e) {
    size_t i = pos[static_cast<size_t>(e)];
    x[i] = static_cast<uint16_t>((x[i] + 1) % 8);
  }
  auto res = dec_pipeline_symbols(x, code, 8);
  REQUIRE(res.has_value());
  CHECK(res->message == m);
  CHECK(res->corrected == 13);
}

TEST_CASE("rational rounding in the demodulator", "[coding]") {
  CHECK(round_half_up(Rational(1, 2)) == 1);
  CHECK(round_half_up(Rational(-1, 2)) == 0);
  CHECK(round_half_up(Rational(3, 2)) == 2);
  CHECK(round_half_up(Rational(7, 3)) == 2);
  CHECK(round_half_up(Rational(-7, 3)) == -2);
}

TEST_CASE("dec_pipeline rounds and wraps rational observations", "[coding]") {
  BchCode code = make_bch(CodeSpec{256, 256, 0, 10, 1023, 1023});
  std::mt19937 rng(40);
  std::bernoulli_distribution bit(0.5);
  BitVec m(256);
  for (auto& b : m) b = bit(rng);
  SymbolWord x = enc_pipeline(m, code, 2);
  std::vector<Rational> y(x.size());
  std::uniform_int_distribution<int> jitter(-40, 40);
  for (size_t i = 0; i < x.size(); ++i)
    y[i] = Rational(x[i]) + Rational(jitter(rng), 100) + Rational(2 * jitter(rng));
  auto res = dec_pipeline(y, code, 2);
  REQUIRE(res.has_value());
  CHECK(res->message == m);
}

}  // namespace
